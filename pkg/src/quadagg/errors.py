"""Exception types shared by all modules."""


class QuadAggError(Exception):
    """Base class for all library errors."""


class EmptySample(QuadAggError):
    """No sample point found; the set may be empty on the box (not a proof)."""


class IllConditioned(QuadAggError):
    """A linear solve was too ill-conditioned to trust."""


class DegeneratePoly(QuadAggError):
    """A polynomial trimmed to identically zero."""


class SingularDirection(QuadAggError):
    """The requested direction lies on the zero set of the form."""


class NonTransverse(QuadAggError):
    """A probe line kept hitting the curve tangentially after retries."""


class GridTooCoarse(QuadAggError):
    """A detected component has too few grid nodes; refine the grid."""


class HypothesisViolated(QuadAggError):
    """A required certified hypothesis does not hold for this input."""


class CurveNotHyperbolic(QuadAggError):
    """The determinant form failed the hyperbolicity certificate."""


class VarietyNotEmpty(QuadAggError):
    """The common zero set could not be certified empty."""


class NoInteriorSamples(QuadAggError):
    """Classification needs a nonempty sample corpus."""


class LeavesOrthant(QuadAggError):
    """The shifted coefficient vector left the nonnegative orthant."""


class PreconditionFailed(QuadAggError):
    """A named precondition of the operation does not hold."""


class DegenerateInput(QuadAggError):
    """Input points were affinely degenerate."""
