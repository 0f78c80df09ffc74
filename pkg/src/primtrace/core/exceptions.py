"""
Error hierarchy shared by every service.

Each error carries a stable ``code`` so the command surface can report
failures without parsing messages.
"""

from typing import Optional


class PrimtraceError(Exception):
    """Base class for all library errors"""

    code = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class InputValidationError(PrimtraceError, ValueError):
    """Raised when caller-supplied parameters are malformed"""

    code = "invalid_input"


class NotPrimeError(InputValidationError):
    code = "not_prime"


class NotPrimePowerError(InputValidationError):
    code = "not_prime_power"


class NonDivisorError(InputValidationError):
    code = "non_divisor"


class DivisibleEntriesError(InputValidationError):
    code = "divisible_entries"


class TupleSizeError(InputValidationError):
    code = "k_out_of_range"


class NotCoprimeError(InputValidationError):
    code = "not_coprime"


class DomainError(InputValidationError):
    code = "domain"


class ElementEncodingError(InputValidationError):
    code = "bad_encoding"


class StrategyError(InputValidationError):
    code = "strategy"


class SubfieldMembershipError(InputValidationError):
    code = "subfield_membership"

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class ResourceLimitError(PrimtraceError):
    """Raised when a configured ceiling or effort budget is exhausted"""

    code = "resource_limit"

    def __init__(self, message: str, limit: Optional[int] = None):
        super().__init__(message)
        self.limit = limit


class InvariantViolation(PrimtraceError, AssertionError):
    """Internal cross-check failed; never caused by user input"""

    code = "invariant"
