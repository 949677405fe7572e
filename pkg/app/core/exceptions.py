"""
Exception hierarchy of the lab.

Every error carries the exit code used by the CLI and the status code used by
the HTTP surface, so both boundaries translate errors the same way.
"""

from typing import Optional


class LabError(Exception):
    """Base class for all errors raised by the solver and the lab"""
    exit_code: int = 1
    status_code: int = 422

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ConfigurationError(LabError):
    """Invalid run or study configuration"""


class ShapeError(LabError):
    """Samples or fields do not live on the expected grid"""


class DomainError(LabError):
    """Argument outside the domain of an operator"""


class PreconditionError(LabError):
    """A documented precondition of an operation is violated"""


class AdmissibilityError(LabError):
    """Exponent pair (p, q) is not admissible for the Strichartz norm"""


class FitError(LabError):
    """Too few usable rows to fit a convergence order"""


class BlowUpError(LabError):
    """Non-finite values produced by a time step"""
    exit_code = 2
    status_code = 500

    def __init__(self, step: int, message: Optional[str] = None):
        super().__init__(message or f"Non-finite values after step {step}")
        self.step = step


class SelfTestFailure(LabError):
    """At least one check of the property suite failed"""
    exit_code = 3
    status_code = 500
