"""Exception types. The CLI maps each one to its own exit code."""


class InvariantError(ValueError):
    """A model object was built with inconsistent or invalid data."""


class ParameterError(ValueError):
    """Generator or driver parameters are outside their valid range."""


class CapExceeded(RuntimeError):
    """An exhaustive search would exceed the configured size limit."""


class UndefinedRatio(ArithmeticError):
    """A ratio metric has a zero denominator."""


class ParseError(ValueError):
    """An input document is malformed or uses inexact numbers."""
