SCHEMA_VERSION = 1

# Exit codes of the management commands.
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_EXPECTATION_MISS = 4

METHODS = ("basic", "iossa", "deriv")

RESIDUAL_LABEL = "residual"
COMPONENT_LABEL = "component_{index}"

# Significant digits used when floats are written to CSV artifacts.
FLOAT_DIGITS = 17

BIT_GENERATORS = ("PCG64", "PCG64DXSM", "Philox", "SFC64", "MT19937")

# Version of the scenario registry file layout.
REGISTRY_SCHEMA_VERSION = 1
