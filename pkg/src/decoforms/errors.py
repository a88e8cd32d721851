"""Exception hierarchy shared by the package."""


class DecoformsError(Exception):
    """Base class for all package errors."""


class FormError(DecoformsError, ValueError):
    pass


class FormSyntaxError(FormError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class HomogeneityError(FormError):
    pass


class ZeroFormError(FormError):
    pass


class PrecisionError(DecoformsError, ArithmeticError):
    """Numerical work could not be verified exactly at any available precision."""


class UnsupportedInputError(DecoformsError):
    pass


class InvariantUndefinedError(DecoformsError):
    pass


class DivergenceError(DecoformsError, ArithmeticError):
    """The requested volume is infinite."""


class PreconditionError(DecoformsError, ValueError):
    pass


class ResourceError(DecoformsError):
    """The requested computation exceeds the configured budget."""


class InsufficientDataError(DecoformsError, ValueError):
    """Too few usable points for a fit."""
