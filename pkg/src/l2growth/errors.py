"""Exception hierarchy shared by all l2growth modules."""


class L2GrowthError(Exception):
    """Base class for all library errors."""


class SearchCapExceeded(L2GrowthError):
    """An enumeration or BFS hit its cap before reaching a conclusion.

    For shortest-element searches, ``lower_bound`` is a certified lower
    bound on the true answer (cap + 1).
    """

    def __init__(self, message, lower_bound=None):
        super().__init__(message)
        self.lower_bound = lower_bound


class NotFiniteIndex(L2GrowthError):
    """The subgroup does not have finite index (singular basis matrix)."""


class OrderCapExceeded(L2GrowthError):
    """A finite quotient or instantiated cover is larger than the configured cap."""


class SizeCapExceeded(L2GrowthError):
    """A dense computation (eigensolver, symbolic determinant) exceeds its size cap."""


class DimensionOutOfRange(L2GrowthError):
    """Requested chain-complex dimension does not exist."""


class NotAbelian(L2GrowthError):
    """Operation requires a free abelian deck group."""


class NotRankOne(L2GrowthError):
    """Operation requires deck group of rank one."""


class DegenerateZ(L2GrowthError):
    """Chebyshev window parameter z must lie strictly inside (0, 1)."""


class GapNotVerified(L2GrowthError):
    """No evidence that the spectral density vanishes below the claimed gap."""


class LambdaAboveGap(L2GrowthError):
    """Eigenvalue-count threshold lies outside the usable spectral range."""


class HypothesisUnverified(L2GrowthError):
    """A density decay hypothesis failed its verification against the estimate."""


class ShortTooSmall(L2GrowthError):
    """Shortest subgroup element too small for the requested bound regime."""


class InsufficientGrid(L2GrowthError):
    """Density grid does not span enough decades for a decay-rate fit."""


class FamilyNotLogUniform(L2GrowthError):
    """Subgroup family fails the logarithmic short-versus-index growth model."""


class CrossCheckMismatch(L2GrowthError):
    """Two independent computations of the same quantity disagree.

    This always indicates a library bug and is never silently accepted.
    """


class DimensionTooLow(L2GrowthError):
    """Stripe dimension would interact with cells of the base complex."""


class RankOutOfRange(L2GrowthError):
    """Torus rank outside the supported range."""


class DocumentError(L2GrowthError):
    """A complex document failed to parse or validate."""
