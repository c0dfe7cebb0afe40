"""Exception hierarchy shared by every module."""


class SOSError(Exception):
    """Base class for all errors raised by this package."""


class InvalidContext(SOSError, ValueError):
    pass


class NonConvergent(SOSError, ArithmeticError):
    pass


class SizeTooLarge(SOSError, ValueError):
    pass


class ForbiddenFace(SOSError, ValueError):
    pass


class SingularDenominator(SOSError, ZeroDivisionError):
    pass


class IndexOutOfRange(SOSError, IndexError):
    pass


class SingularSystem(SOSError, ArithmeticError):
    pass


class SingularNormalization(SOSError, ArithmeticError):
    pass


class SamplingExhausted(SOSError, RuntimeError):
    pass


class ConfigError(SOSError):
    """Raised while loading a run configuration."""

    def __init__(self, message, field=None, line=None):
        super().__init__(message)
        self.field = field
        self.line = line


class ParseError(ConfigError):
    pass


class ValidationError(ConfigError):
    pass
