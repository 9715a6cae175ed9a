"""
Custom Exceptions for the Rainbow-Triangle Toolkit
==================================================
Error types raised across the toolkit, with the field or precondition that failed.
"""

from typing import Optional


class RainbowError(Exception):
    """Base exception for all toolkit errors."""
    pass


class ValidationError(RainbowError):
    """Raised when input validation fails."""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.field = field


class TemplateFormatError(ValidationError):
    """Raised when a template file cannot be parsed."""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field {field}")
        text = f"{message} ({', '.join(location)})" if location else message
        super().__init__(text, field=field)
        self.line = line


class PreconditionError(ValidationError):
    """Raised when a named precondition of an operation does not hold."""

    def __init__(self, name: str, message: str):
        super().__init__(f"precondition '{name}' failed: {message}", field=name)
        self.name = name


class ConvergenceError(RainbowError):
    """Raised when a root solve fails to reach its tolerance."""
    pass


class CertificationError(RainbowError):
    """Raised when a numerical certificate cannot be established."""
    pass


class SearchLimitError(RainbowError):
    """Raised when an exhaustive search is requested beyond its size limit."""
    pass


class ConfigurationError(RainbowError):
    """Raised when toolkit configuration is invalid."""
    pass


class StructureViolation(RainbowError):
    """Raised when a normalized template lacks the expected edge structure."""
    pass
