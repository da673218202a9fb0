"""Left-invariant pseudo-Riemannian Einstein metrics in dimension four.

Construction of the cube-root model families, their full curvature
apparatus (connection, curvature tensor, Ricci, curvature operator on
bivectors, Hodge star, Weyl decomposition), eigenframe calculus, Killing
structures with real-form extraction, the exponential map of the simply
transitive field algebra, and an algebraic classifier.
"""

from .linalg import (
    TOL,
    ComplexSpectrum,
    SignPattern,
    SymBilinearForm,
    complex_spectrum,
    is_complex_diagonalizable,
    is_self_adjoint,
    signature_of,
)
from .models import (
    EinsteinCase,
    ManifoldModel,
    MetricLieAlgebra,
    ModelFamilyParams,
    PetrovData,
    bracket_oracle,
    build_family,
    build_manifold_model,
    build_metric_lie_algebra,
    diagonalizable_F,
    einstein_case,
    family_model,
    nondiagonalizable_F,
    scalar_F,
    standard_inner_product,
)
from .curvature import (
    CurvatureSummary,
    CurvatureTensor,
    FrameConnection,
    curvature_summary,
    curvature_tensor,
    levi_civita,
    nabla_R,
    ricci_tensor,
    sectional_curvature,
)
from .bivectors import (
    BivectorSpace,
    ComplexE,
    HodgeStar,
    SelfDualSplit,
    WeylDecomposition,
    bivector_space,
    build_E,
    commutator_with_star,
    curvature_operator,
    hodge_star,
    project_H_iso,
    restrict_to_E,
    schouten_weyl,
    selfdual_split,
)
from .classify import ClassificationResult, EigenPattern, classify, eigen_pattern, weyl_trace_identities
from .frames import (
    ConnectionOneForms,
    KillingStructure,
    OrthoEigenFrame,
    RealFormWitness,
    WeylDiagonalData,
    build_killing_structure,
    connection_forms,
    divergence_check,
    extract_real_form,
    normalized_frame,
    parallel_criterion,
    structure_equation_check,
    weyl_components,
)
from .expmap import (
    FlowResult,
    commutant_fields,
    commutant_killing_check,
    differential_check,
    exp_map,
    flow,
    pullback_field,
    q_of_operator,
)
from . import report  # noqa: E402  (depends on the modules above)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
