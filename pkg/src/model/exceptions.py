"""
Exception hierarchy for the mixed NCW combat toolkit
"""

from typing import Optional


class NCWError(Exception):
    """Base class for every error raised by the toolkit"""


class ValidationError(NCWError):
    """Invalid Scenario, Allocation or configuration values"""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class DomainError(NCWError):
    """A function was evaluated outside its mathematical domain"""


class NumericError(NCWError):
    """The integrator produced a non-finite state"""


class PreconditionError(NCWError):
    """An operation was called in a state it does not accept"""
