"""
Exception hierarchy for the OISL toolkit and the mapping onto CLI exit codes.
"""

from typing import Any, Dict, Optional

from hydra.errors import HydraException
from omegaconf.errors import OmegaConfBaseException

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_INVALID_CONFIG = 2
EXIT_NUMERICAL_FAILURE = 3
EXIT_IO_FAILURE = 4


class OislError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(OislError, ValueError):
    """A physical or numerical parameter is outside its valid range."""


class DomainError(OislError, ValueError):
    """A density or distribution was evaluated outside its support."""


class SingularGeometryError(OislError, ValueError):
    """The requested geometry makes a quantity singular (e.g. zero range in far field)."""


class EmptySampleError(OislError, ValueError):
    """A sampler was asked for zero samples."""


class ConfigError(OislError, ValueError):
    """The run configuration is invalid (unknown keys, bad values, unreadable file)."""


class NumericalFailureError(OislError, RuntimeError):
    """A quadrature or special-function evaluation did not reach its tolerance."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        self.diagnostics = dict(diagnostics or {})
        if self.diagnostics:
            details = ", ".join(f"{k}={v}" for k, v in self.diagnostics.items())
            message = f"{message} ({details})"
        super().__init__(message)


class FarFieldWarning(UserWarning):
    """Analytic statistics used with w_z/w_d below the far-field validity ratio."""


def exit_code_for(exc: BaseException) -> Optional[int]:
    """Map an exception onto the CLI exit code contract (None for unexpected errors)."""
    if isinstance(exc, NumericalFailureError):
        return EXIT_NUMERICAL_FAILURE
    # composition errors, including missing config groups (an IOError subclass)
    if isinstance(exc, HydraException):
        return EXIT_INVALID_CONFIG
    if isinstance(exc, OSError):
        return EXIT_IO_FAILURE
    if isinstance(exc, (OislError, ValueError, OmegaConfBaseException)):
        return EXIT_INVALID_CONFIG
    return None
