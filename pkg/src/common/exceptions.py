"""
Custom exception classes for exit-time computations.
Provides structured error handling across all modules.
"""

from typing import Optional


class IsoperimetryException(Exception):
    """Base exception for all computations in this repository"""

    def __init__(self, message: str, details: Optional[dict] = None):
        super().__init__(message)
        self.details = details or {}


class DomainError(IsoperimetryException):
    """Raised when a numeric input lies outside an operation's domain"""

    pass


class AccuracyError(IsoperimetryException):
    """Raised when a series tail bound cannot be reached within max_terms"""

    def __init__(self, message: str, achieved_bound: float, details: Optional[dict] = None):
        super().__init__(message, details)
        self.achieved_bound = achieved_bound


class CapabilityError(IsoperimetryException):
    """Raised when an analytic route is requested for a shape that has none"""

    pass


class PreconditionError(IsoperimetryException):
    """Raised when an operation's precondition does not hold"""

    pass


class ValidationException(IsoperimetryException):
    """Raised when a geometric or tabulated description fails validation"""

    pass


class ConfigurationError(IsoperimetryException):
    """Raised when an experiment configuration cannot be parsed or validated"""

    def __init__(self, message: str, location: Optional[str] = None, details: Optional[dict] = None):
        super().__init__(message, details)
        self.location = location
