"""Exception hierarchy shared by all modules.

The CLI prints ``type(exc).__name__`` for any :class:`HeckeError`, so the
class names double as the user-facing error names.
"""


class HeckeError(Exception):
    """Base class for domain errors."""


class MismatchedPrime(HeckeError, ValueError):
    pass


class DivisionByZero(HeckeError, ZeroDivisionError):
    pass


class PrecisionExhausted(HeckeError, ArithmeticError):
    pass


class ZeroInput(HeckeError, ValueError):
    pass


class NotPrime(HeckeError, ValueError):
    pass


class SingularMatrix(HeckeError, ValueError):
    pass


class RegionOutsideDomain(HeckeError, ValueError):
    pass


class InvalidWord(HeckeError, ValueError):
    pass


class DepthExceedsPrecision(HeckeError, ValueError):
    pass
