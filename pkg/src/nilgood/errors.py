"""Exception types shared across the package."""


class NilgoodError(Exception):
    """Base class for all package errors."""


class DomainMismatchError(NilgoodError, ValueError):
    """Operands live in different rings (or have incompatible shapes)."""


class UnsupportedRingError(NilgoodError, ValueError):
    """The operation needs a field but got a composite modular ring."""


class NotInvertibleError(NilgoodError, ValueError):
    """A matrix required to be invertible is singular."""


class PreconditionError(NilgoodError, ValueError):
    pass


class InternalError(NilgoodError, RuntimeError):
    """A constructed certificate failed its own verification.

    Raised instead of returning an unverified result; always indicates a bug.
    """


class BudgetExceededError(NilgoodError, ValueError):
    pass


class ParseError(NilgoodError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
