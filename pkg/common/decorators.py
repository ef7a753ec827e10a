# Core
import logging
from functools import wraps

# Libs
from django.core.management.base import CommandError
from rest_framework.exceptions import ValidationError as DRFValidationError

# Global
from common.errors import describe, exit_code_for
from common.exceptions import InputError, NumericalError


logger = logging.getLogger(__name__)


def command_errors(handle):
    """Turn domain errors raised by a command handler into `CommandError`."""

    @wraps(handle)
    def wrapper(*args, **kwargs):
        try:
            return handle(*args, **kwargs)
        except (InputError, NumericalError, DRFValidationError) as exc:
            logger.debug("Command failed with %s", type(exc).__name__)
            raise CommandError(describe(exc), returncode=exit_code_for(exc))

    return wrapper
