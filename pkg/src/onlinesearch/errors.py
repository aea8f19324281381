"""Exception hierarchy shared by every module of the package."""


class SearchError(Exception):
    """Base class for all domain errors raised by onlinesearch."""


class InvalidInputError(SearchError, ValueError):
    """Malformed or inconsistent input (empty sequence, bad parameter, ...)."""


class OutOfRangeError(SearchError, ValueError):
    """A value falls outside the admissible price or error range."""


class ContractViolationError(SearchError):
    """A caller broke a promise the algorithm relies on (e.g. eta > H)."""


class GuaranteeUnavailableError(SearchError):
    """The requested bound is only proven under conditions not met here."""


class NoWitnessError(SearchError):
    pass


class NonThresholdPolicyError(SearchError):
    pass


class InsufficientDataError(SearchError):
    pass


class InternalInvariantError(SearchError, RuntimeError):
    pass


class ParseError(SearchError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
