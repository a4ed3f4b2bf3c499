"""Exception hierarchy shared by all modules."""


class CclError(Exception):
    """Base class for every error raised by this package."""


class InvalidParam(CclError, ValueError):
    pass


class NotSquare(InvalidParam):
    pass


class ZeroSpectralRadius(InvalidParam):
    pass


class DegenerateInput(InvalidParam):
    pass


class SingularSystem(CclError, ArithmeticError):
    pass


class DimensionMismatch(InvalidParam):
    pass


class SeriesTooShort(InvalidParam):
    pass


class IndexOutOfRange(InvalidParam, IndexError):
    pass


class InvalidAperture(InvalidParam):
    pass


class LambdaOutOfRange(InvalidParam):
    pass


class ShapeMismatch(InvalidParam):
    pass


class ZeroVarianceTarget(InvalidParam):
    pass


class NotSingleChannel(InvalidParam):
    pass


class ParseError(CclError, ValueError):
    """Malformed CSV input; carries the 1-based row and column of the fault."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class ConfigError(CclError, ValueError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
