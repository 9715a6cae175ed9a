from functools import wraps
import logging

from src.core.exceptions import (
    CertificationError,
    ConfigurationError,
    ConvergenceError,
    RainbowError,
    SearchLimitError,
    StructureViolation,
    ValidationError,
)
from src.models.command import CommandResult

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


class CommandError(Exception):
    """Custom exception for CLI command errors"""
    def __init__(self, message, exit_code=EXIT_FAILURE, payload=None):
        super().__init__(message)
        self.message = message
        self.exit_code = exit_code
        self.payload = payload

    def to_dict(self):
        rv = dict(self.payload or ())
        rv['message'] = self.message
        rv['exit_code'] = self.exit_code
        return rv


def exit_code_for(error: Exception) -> int:
    """Map a toolkit exception to a process exit code."""
    if isinstance(error, CommandError):
        return error.exit_code
    if isinstance(error, (ValidationError, SearchLimitError, ConfigurationError)):
        return EXIT_USAGE
    if isinstance(error, (CertificationError, StructureViolation, ConvergenceError)):
        return EXIT_FAILURE
    return EXIT_FAILURE


def handle_command_error(f):
    """
    Decorator to turn toolkit errors into a CommandResult with the proper exit code.
    """
    @wraps(f)
    def decorated_function(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except CommandError as e:
            logger.error(f"Command error in {f.__name__}: {e.message}")
            return CommandResult(exit_code=e.exit_code, report=f"error: {e.message}")
        except RainbowError as e:
            logger.error(f"{type(e).__name__} in {f.__name__}: {e}")
            return CommandResult(exit_code=exit_code_for(e), report=f"error: {e}")
        except Exception as e:
            logger.error(f"Unexpected error in {f.__name__}: {str(e)}", exc_info=True)
            return CommandResult(exit_code=EXIT_FAILURE, report=f"error: internal failure ({e})")
    return decorated_function
