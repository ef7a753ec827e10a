try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path


# ----------------------------------------------------------------------
# 0. SETUP
# ----------------------------------------------------------------------
BASE_DIR = Path(__file__).resolve().parent.parent

ENV_FILE = BASE_DIR / "env.toml"
if not ENV_FILE.exists():
    ENV_FILE = BASE_DIR / "env.dev.toml"

with open(ENV_FILE, mode="rb") as env_file:
    env = tomllib.load(env_file)

# ----------------------------------------------------------------------
# 1. DJANGO CORE SETTINGS
# ----------------------------------------------------------------------

# DEBUGGING

DEBUG = env["core"]["debug"]

# SECURITY
SECRET_KEY = env["core"]["secret_key"]

# MODELS

INSTALLED_APPS = [
    "apps.series",
    "apps.oblique",
    "apps.decomposition",
    "apps.iossa",
    "apps.deriv",
    "apps.diagnostics",
    "apps.lab",
    "apps.cli",
    "rest_framework",
]

# DATABASES
# The toolkit is stateless: series come from CSV files and results are
# written as CSV/JSON artifacts.
DATABASES = {}

# GLOBALIZATION

LANGUAGE_CODE = "en-us"

USE_I18N = False

USE_TZ = True

# LOGGING

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "rich": {"datefmt": "[%X]"},
    },
    "handlers": {
        "console": {
            "class": "rich.logging.RichHandler",
            "formatter": "rich",
            "level": "DEBUG",
            "rich_tracebacks": True,
            "tracebacks_show_locals": DEBUG,
        },
    },
    "loggers": {
        "django": {
            "handlers": [],
            "level": "INFO",
        },
        "apps": {
            "handlers": ["console"],
            "level": env["core"].get("log_level", "INFO"),
            "propagate": False,
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
}

# ----------------------------------------------------------------------
# 2. THIRD PARTY APPS SETTINGS
# ----------------------------------------------------------------------

# DJANGO REST FRAMEWORK

REST_FRAMEWORK = {
    "COERCE_DECIMAL_TO_STRING": False,
    "STRICT_JSON": True,
    "UNAUTHENTICATED_USER": None,
}

# ----------------------------------------------------------------------
# 3. PROJECT SETTINGS
# ----------------------------------------------------------------------

# NUMERICS

NUMERICS = {
    "RANK_TOLERANCE": env["numerics"]["rank_tolerance"],
    "CONSISTENCY_THRESHOLD": env["numerics"]["consistency_threshold"],
    "CONSISTENCY_POLICY": env["numerics"]["consistency_policy"],
}

# SIGNAL LAB

LAB = {
    "BIT_GENERATOR": env["lab"]["bit_generator"],
    "WINSORIZE_FRACTION": env["lab"]["winsorize_fraction"],
    "MAX_ITERATIONS": env["lab"]["max_iterations"],
    "WORKERS": env["lab"]["workers"],
    "REGISTRY": BASE_DIR / env["lab"]["registry"],
}
