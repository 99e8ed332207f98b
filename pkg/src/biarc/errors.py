"""Exception types shared across the package."""


class BiarcError(Exception):
    """Base class for all errors raised by this package."""


class DigraphParseError(BiarcError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ContractViolation(BiarcError, ValueError):
    """An operation was called with inputs outside its precondition."""


class InternalError(BiarcError, RuntimeError):
    """A constructed certificate failed its own verification.

    ``state`` carries whatever the caller had at hand for debugging.
    """

    def __init__(self, message: str, state: dict | None = None):
        self.state = state or {}
        super().__init__(message)


class SizeGuardError(BiarcError, ValueError):
    """An exhaustive search was asked to run beyond its size bound."""

    def __init__(self, what: str, n: int, bound: int):
        self.bound = bound
        super().__init__(f"{what} refuses n={n}: exhaustive search bounded to n <= {bound}")
