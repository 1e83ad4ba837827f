"""Exception types shared across svplab modules."""


class SvpLabError(Exception):
    """Base class for all svplab errors."""


class NotPositiveDefinite(SvpLabError):
    """A Schur pivot fell at or below the pivot floor during factorization."""


class DimensionMismatch(SvpLabError):
    """Operand shapes are incompatible."""


class InvalidSpec(SvpLabError):
    """A sample specification violates its invariants."""


class SingularMinor(SvpLabError):
    """A leave-one-out principal minor of the Gram matrix is singular."""

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"principal minor without row/column {index} is singular")


class SingularGram(SvpLabError):
    """The full Gram matrix is singular."""


class DegenerateDual(SvpLabError):
    """The dual normalization constant is numerically indistinguishable from zero."""


class Diverged(SvpLabError):
    """The dual objective is unbounded above: the data admit no separator."""


class ZeroDiagonal(SvpLabError):
    """Some sample is the zero vector, making its margin constraint unsatisfiable."""


class InvalidCounts(SvpLabError):
    """Success/trial counts are inconsistent."""


class DomainError(SvpLabError):
    """An argument lies outside the mathematical domain of the function."""


class InvalidN(SvpLabError):
    """Sample count outside the supported range."""


class Unresolvable(SvpLabError):
    """A requested quantile level is never crossed by the rate grid."""


class EmptySelection(SvpLabError):
    """No summaries match the requested selection."""
