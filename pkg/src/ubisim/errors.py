"""Exception types shared across the library."""


class UbisimError(Exception):
    """Base class for all errors raised by this library."""


class ValidationError(UbisimError):
    """A value refers to an unknown state or alphabet symbol, or a machine
    definition violates one of its structural invariants."""


class ContractError(UbisimError):
    """An operation was invoked outside its contract: mismatched alphabets,
    empty word where a non-empty one is required, wrong machine kind, ..."""


class EnumerationLimitError(UbisimError):
    """An exhaustive check was asked to enumerate beyond its size cap."""


class ObservationConflictError(UbisimError):
    """A recorded observation contradicts an earlier one.  Carries the
    longest prefix on which the clash occurs."""

    def __init__(self, message: str, prefix=()):
        super().__init__(message)
        self.prefix = tuple(prefix)


class ParseError(UbisimError):
    """Error in the text format, with the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
