"""Exception hierarchy shared by every module."""


class NonlocalQMError(Exception):
    """Base class for all library errors."""


class InvalidArgument(NonlocalQMError, ValueError):
    pass


class InvalidState(NonlocalQMError, ValueError):
    pass


class PreconditionViolation(NonlocalQMError, ValueError):
    pass


class UndefinedRatio(NonlocalQMError, ZeroDivisionError):
    pass


class IllPosedInput(NonlocalQMError, ArithmeticError):
    pass


class SingularityError(NonlocalQMError, ArithmeticError):
    pass


class IntegrationFailure(NonlocalQMError, RuntimeError):
    """Raised when an ODE integration stops early.

    The partially integrated trajectory is kept on ``partial`` so callers
    can inspect how far the run got.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
