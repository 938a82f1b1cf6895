"""Exception hierarchy shared across the package."""


class QkcError(Exception):
    """Base class for every error raised by qkc."""


class ParseError(QkcError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class RenameCollision(QkcError):
    pass


class UnknownGateSet(QkcError, LookupError):
    pass


class UnknownGate(QkcError, LookupError):
    pass


class ParamArity(QkcError, ValueError):
    pass


class DimensionMismatch(QkcError, ValueError):
    pass


class EmptyStack(QkcError, IndexError):
    pass


class UnknownCallback(QkcError, LookupError):
    pass


class InvariantViolation(QkcError):
    pass


class StepBudgetExceeded(QkcError):
    pass


class MissingHandler(QkcError, LookupError):
    pass


class GateSetMismatch(QkcError, ValueError):
    pass


class CallbackNameCollision(QkcError, ValueError):
    pass


class UnknownPass(QkcError, LookupError):
    pass
