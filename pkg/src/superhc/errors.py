"""Exception hierarchy shared by all modules."""


class SuperHCError(Exception):
    """Base class for every error raised by the toolkit."""


class DimensionMismatch(SuperHCError, ValueError):
    pass


class SingularPoint(SuperHCError, ValueError):
    """A Cartan point lies on (or within the guard distance of) the singular set."""


class SingularZeroRoot(SingularPoint):
    pass


class NonConvergent(SuperHCError, ArithmeticError):
    pass


class RankTooLarge(SuperHCError, ValueError):
    pass


class AlgebraMismatch(SuperHCError, ValueError):
    pass


class CapacityExceeded(SuperHCError, MemoryError):
    pass


class UnknownSuite(SuperHCError, KeyError):
    pass
