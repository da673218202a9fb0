"""Exception types shared across the package."""


class CurvHomError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateForm(CurvHomError):
    """A bilinear form that must be nondegenerate has (numerically) zero determinant."""


class DimensionMismatch(CurvHomError):
    """Operands have incompatible dimensions."""


class ZeroParameter(CurvHomError):
    """A family parameter that must be nonzero is zero."""


class ExcludedSignature(CurvHomError):
    """The requested parameters produce the sign pattern ---+, which is outside
    the three admissible patterns (after an overall sign change it is Lorentzian,
    and the families are only constructed for the canonical patterns)."""


class NotSelfAdjoint(CurvHomError):
    """An operator that must be self-adjoint relative to the given form is not."""


class DegenerateMetric(CurvHomError):
    """The metric Gram matrix of a Lie algebra is singular."""


class DegeneratePlane(CurvHomError):
    """A tangent 2-plane with zero Gram determinant has no sectional curvature."""


class WrongDimension(CurvHomError):
    """An operation defined only in dimension four received another dimension."""


class OrthonormalizationFailure(CurvHomError):
    """Indefinite Gram-Schmidt could not produce a unit vector at some step."""


class NotStarCommuting(CurvHomError):
    """An operator expected to commute with the Hodge star does not."""


class NullVector(CurvHomError):
    """A vector with g(u,u) = 0 was passed where a non-null vector is required."""


class NotDiagonalizable(CurvHomError):
    """A matrix expected to be (complex-)diagonalizable is not."""


class NullEigenvector(CurvHomError):
    """An eigenvector with h(a,a) = 0 cannot be normalized to h(a,a) = +-2."""


class FrameExpansionFailure(CurvHomError):
    """A derivative of a frame section does not lie in the span of the frame."""


class DivergenceNotZero(CurvHomError):
    """The divergence of the Weyl operator is nonzero (non-Einstein input)."""


class NullEigenvectorNorm(CurvHomError):
    """An eigenvector of the cyclic operator has zero self inner product and
    cannot be rescaled to the common norm."""


class NotARealForm(CurvHomError):
    """The candidate real subalgebra fails closure, realness, or spanning."""


class GammaNotReal(CurvHomError):
    """g(w,w) of a Killing structure is not real, so no real form can exist."""


class SingularQ(CurvHomError):
    """Q(ad v) is singular (an eigenvalue of ad v sits at 2*pi*i*k, k != 0)."""


class StepFailure(CurvHomError):
    """The integrator could not reach the requested local error tolerance."""


class InconsistentEvidence(CurvHomError):
    """Classifier evidence combination that cannot occur for genuine inputs;
    signals numerical trouble upstream."""


class TraceNotZero(CurvHomError):
    """A spectrum expected to sum to zero does not."""


class UsageError(CurvHomError):
    """Invalid command-line parameters."""
