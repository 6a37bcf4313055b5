"""
Error Types
Exception hierarchy shared by the library modules and the CLI exit codes
"""

from typing import Any, Dict, Optional


class KineticLimitError(Exception):
    """Base error, carries machine readable details for error.txt"""

    exit_code = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = dict(details or {})


class ConfigurationError(KineticLimitError, ValueError):
    """Invalid parameters, unknown config keys or an unsupported option"""

    exit_code = 2


class DomainError(ConfigurationError):
    """Argument outside the domain of a pure function"""


class NumericalError(KineticLimitError, ArithmeticError):
    """Solver, extrapolation or quadrature failure"""

    exit_code = 3


class AssumptionViolation(NumericalError):
    """Reservoir decay certificate or spectral gap check failed"""


def exitCodeFor(exc: BaseException) -> int:
    """Map an exception to the CLI exit code"""
    if isinstance(exc, KineticLimitError):
        return exc.exit_code
    return 1
