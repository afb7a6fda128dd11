"""
Utility functions and helpers shared across the project.
"""

from .errors import (
    ConfigError,
    DomainError,
    InvalidParameterError,
    NumericalFailureError,
    OislError,
    exit_code_for,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "InvalidParameterError",
    "NumericalFailureError",
    "OislError",
    "exit_code_for",
]
