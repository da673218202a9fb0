"""Metric Lie algebras [u, v] = Fv on V + Ru and their model families.

The construction: V carries a nondegenerate symmetric form and a self-adjoint
operator F; the algebra X = V + Ru gets the bracket [u, v] = Fv, [v, v'] = 0
and the metric g = delta on u, <,> on V, with u orthogonal to V.  The model
manifold is the chart V x (0, inf) on which u acts as the linear field
(x, t) |-> (-Fx, t) and V acts by constant fields.

Families:
  * ``diag``    -- F = p * (rotation by 120 degrees on C) + p on R, the
                   complex-diagonalizable cube-root family;
  * ``nondiag`` -- F(z, t) = (+-i t, Re z), traceless with F^2 != 0, F^3 = 0,
                   whose curvature operator is nilpotent;
  * ``const``   -- F = lambda * Id, the constant-curvature case.

Basis order is fixed as (u, e1, e2, e3) with e1 = (1,0), e2 = (i,0),
e3 = (0,1) relative to V = C x R.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DegenerateMetric,
    DimensionMismatch,
    ExcludedSignature,
    NotSelfAdjoint,
    ZeroParameter,
)
from .exactnum import QRoot3, exact_matrix, gauss_inverse, zeros_like_field
from .linalg import TOL, SignPattern, SymBilinearForm, is_self_adjoint, signature_of_gram

Q_CBRT = cmath.exp(2j * cmath.pi / 3)  # primitive cube root of unity


def standard_inner_product(pm_sign: int, exact: bool = False):
    """Gram matrix of <(z,t),(z',t')> = Im(z z') +- t t' on V = C x R.

    In the basis (e1, e2, e3) this is [[0,1,0],[1,0,0],[0,0,pm]], with the
    sign pattern -+/-+ (one minus for pm=+1, two for pm=-1).
    """
    if pm_sign not in (1, -1):
        raise ValueError("pm_sign must be +-1")
    rows = [[0, 1, 0], [1, 0, 0], [0, 0, pm_sign]]
    if exact:
        return exact_matrix(rows)
    return np.array(rows, dtype=float)


def diagonalizable_F(p, exact: bool = False):
    """F(z,t) = (p q z, p t) with q = exp(2 pi i / 3), as a real 3x3 matrix.

    Trace F = Trace F^2 = 0 and F^3 = p^3 Id; the characteristic roots are
    p, pq and p conj(q).
    """
    if exact:
        p = Fraction(p)
        if p == 0:
            raise ZeroParameter("p must be nonzero")
        h = QRoot3(Fraction(-1, 2))
        s = QRoot3(0, Fraction(1, 2))  # sqrt(3)/2
        m = exact_matrix([[h, -s, 0], [s, h, 0], [0, 0, 1]])
        return np.array([[QRoot3(p) * x for x in row] for row in m], dtype=object)
    p = float(p)
    if p == 0.0:
        raise ZeroParameter("p must be nonzero")
    c, s = -0.5, np.sqrt(3.0) / 2.0
    return p * np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def nondiagonalizable_F(pm_sign: int, exact: bool = False):
    """F(z,t) = (+-i t, Re z): sends e1 -> e3, e2 -> 0, e3 -> +-e2.

    Satisfies Trace F = Trace F^2 = 0 with F^2 != 0 and F^3 = 0; it is
    self-adjoint for the standard inner product with the same sign choice.
    """
    if pm_sign not in (1, -1):
        raise ValueError("pm_sign must be +-1")
    rows = [[0, 0, 0], [0, 0, pm_sign], [1, 0, 0]]
    if exact:
        return exact_matrix(rows)
    return np.array(rows, dtype=float)


def scalar_F(lam, dim: int = 3, exact: bool = False):
    """F = lambda * Id, the constant-curvature case."""
    if exact:
        m = zeros_like_field(QRoot3(0), (dim, dim))
        for i in range(dim):
            m[i, i] = QRoot3(Fraction(lam))
        return m
    return float(lam) * np.eye(dim)


def nilpotent_F(exact: bool = False):
    """A nonzero traceless F with F^2 = 0, self-adjoint for either standard form."""
    rows = [[0, 1, 0], [0, 0, 0], [0, 0, 0]]
    if exact:
        return exact_matrix(rows)
    return np.array(rows, dtype=float)


@dataclass(frozen=True)
class EinsteinCase:
    """Which of the three Einstein conditions the operator F satisfies."""

    tag: str  # scalar_multiple | nilpotent | traceless_cube | not_einstein
    lam: float | None = None


def einstein_case(F, tol: float = TOL, F_exact=None) -> EinsteinCase:
    """Einstein trichotomy for the metric built from F.

    scalar_multiple: F = lambda Id;  nilpotent: F != 0, tr F = 0, F^2 = 0;
    traceless_cube: F^2 != 0 and tr F = tr F^2 = 0; otherwise the metric is
    not Einstein.  A nonzero trace forces the scalar case.  When an exact
    twin is supplied the ties are decided with no tolerance at all.
    """
    if F_exact is not None:
        return _einstein_case_exact(F_exact)
    F = np.asarray(F, dtype=float)
    n = F.shape[0]
    scale = max(1.0, float(np.max(np.abs(F))))
    lam = float(np.trace(F)) / n
    if np.max(np.abs(F - lam * np.eye(n))) <= tol * scale:
        return EinsteinCase("scalar_multiple", lam)
    if abs(np.trace(F)) > tol * scale:
        return EinsteinCase("not_einstein")
    F2 = F @ F
    if np.max(np.abs(F2)) <= tol * scale**2:
        return EinsteinCase("nilpotent")
    if abs(np.trace(F2)) <= tol * scale**2:
        return EinsteinCase("traceless_cube")
    return EinsteinCase("not_einstein")


def _einstein_case_exact(Fe) -> EinsteinCase:
    n = Fe.shape[0]
    zero = Fe[0, 0] * 0
    tr = zero
    for i in range(n):
        tr = tr + Fe[i, i]
    lam = tr / n
    if all(Fe[i, j] == (lam if i == j else zero) for i in range(n) for j in range(n)):
        return EinsteinCase("scalar_multiple", float(lam))
    if tr != zero:
        return EinsteinCase("not_einstein")
    F2 = Fe @ Fe
    if all(not F2[i, j] for i in range(n) for j in range(n)):
        return EinsteinCase("nilpotent")
    tr2 = zero
    for i in range(n):
        tr2 = tr2 + F2[i, i]
    if tr2 == zero:
        return EinsteinCase("traceless_cube")
    return EinsteinCase("not_einstein")


@dataclass(frozen=True)
class PetrovData:
    """The construction data (V, <,>, F, delta): float matrices plus an
    optional exact twin over Q(sqrt 3)."""

    V_gram: np.ndarray
    F: np.ndarray
    delta: int
    V_gram_exact: np.ndarray | None = None
    F_exact: np.ndarray | None = None
    tol: float = TOL

    def __post_init__(self):
        if self.delta not in (1, -1):
            raise ValueError("delta must be +-1")
        form = SymBilinearForm(self.V_gram, tol=self.tol)
        if not is_self_adjoint(self.F, form, self.tol):
            raise NotSelfAdjoint("F is not self-adjoint relative to the V form")

    @property
    def n(self) -> int:
        return self.V_gram.shape[0] + 1

    @property
    def V_form(self) -> SymBilinearForm:
        return SymBilinearForm(self.V_gram, tol=self.tol)

    @property
    def exact(self) -> bool:
        return self.V_gram_exact is not None and self.F_exact is not None

    def full_gram(self, exact: bool = False):
        """Gram of g on the basis (u, e_1, ..., e_{n-1})."""
        if exact:
            g = zeros_like_field(QRoot3(0), (self.n, self.n))
            g[0, 0] = QRoot3(self.delta)
            g[1:, 1:] = self.V_gram_exact
            return g
        g = np.zeros((self.n, self.n))
        g[0, 0] = float(self.delta)
        g[1:, 1:] = self.V_gram
        return g

    def signature(self) -> SignPattern:
        return signature_of_gram(self.full_gram(), self.tol)


@dataclass(frozen=True)
class ModelFamilyParams:
    """Parameters selecting one named model family member."""

    variant: str  # diag | nondiag | const
    p: float = 1.0
    pm_sign: int = 1
    delta: int = 1

    def __post_init__(self):
        if self.variant not in ("diag", "nondiag", "const"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.pm_sign not in (1, -1) or self.delta not in (1, -1):
            raise ValueError("pm_sign and delta must be +-1")
        if self.variant in ("diag", "const") and self.p == 0:
            raise ZeroParameter("p must be nonzero for this variant")


def build_family(params: ModelFamilyParams, exact: bool = False) -> PetrovData:
    """PetrovData for a named family member, rejecting the ---+ pattern."""
    if params.variant == "nondiag" and params.pm_sign == -1 and params.delta == -1:
        # Same exclusion as below; checked early because the signature test
        # would raise anyway.
        raise ExcludedSignature("delta=-1 with sign - gives the pattern ---+")
    gram = standard_inner_product(params.pm_sign)
    if params.variant == "diag":
        F = diagonalizable_F(params.p)
    elif params.variant == "nondiag":
        F = nondiagonalizable_F(params.pm_sign)
    else:
        F = scalar_F(params.p)
    ge = Fe = None
    if exact:
        ge = standard_inner_product(params.pm_sign, exact=True)
        if params.variant == "diag":
            Fe = diagonalizable_F(params.p, exact=True)
        elif params.variant == "nondiag":
            Fe = nondiagonalizable_F(params.pm_sign, exact=True)
        else:
            Fe = scalar_F(params.p, exact=True)
    data = PetrovData(gram, F, params.delta, ge, Fe)
    pattern = str(data.signature())
    if pattern == "---+":
        raise ExcludedSignature("delta=-1 with sign - gives the pattern ---+")
    return data


@dataclass(frozen=True)
class MetricLieAlgebra:
    """Structure constants and flat metric on the basis (u, e_1, ..., e_{n-1}).

    c[i, j, k] is the X_k-component of [X_i, X_j]; gram is constant on the
    left-invariant frame.
    """

    c: np.ndarray
    gram: np.ndarray
    labels: tuple
    c_exact: np.ndarray | None = None
    gram_exact: np.ndarray | None = None
    tol: float = TOL

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @property
    def exact(self) -> bool:
        return self.c_exact is not None and self.gram_exact is not None

    def gram_inv(self):
        g = np.linalg.inv(self.gram)
        return g

    def gram_inv_exact(self):
        return gauss_inverse(self.gram_exact)

    def bracket(self, x, y):
        """Bracket of two coefficient vectors (complex allowed)."""
        x = np.asarray(x)
        y = np.asarray(y)
        return np.einsum("ijk,i,j->k", self.c, x, y)

    def ad(self, x) -> np.ndarray:
        """Matrix of ad(x) = [x, .] on the frame basis."""
        x = np.asarray(x)
        return np.einsum("ijk,i->kj", self.c, x)

    def jacobi_defect(self, exact: bool = False) -> float:
        """Max abs component of the Jacobi cyclic sum over basis triples."""
        if exact:
            c = self.c_exact
            n = self.dim
            worst = 0.0
            for i in range(n):
                for j in range(n):
                    for k in range(n):
                        for m in range(n):
                            s = c[0, 0, 0] * 0
                            for l in range(n):
                                s = s + c[i, j, l] * c[l, k, m]
                                s = s + c[j, k, l] * c[l, i, m]
                                s = s + c[k, i, l] * c[l, j, m]
                            worst = max(worst, abs(s))
            return worst
        term = np.einsum("ijl,lkm->ijkm", self.c, self.c)
        cyc = term + np.einsum("ijkm->jkim", term) + np.einsum("ijkm->kijm", term)
        return float(np.max(np.abs(cyc))) if cyc.size else 0.0


def build_metric_lie_algebra(data: PetrovData) -> MetricLieAlgebra:
    """Assemble [u, e_j] = F e_j, [e_j, e_k] = 0 with the block metric."""
    F = np.asarray(data.F, dtype=float)
    nV = F.shape[0]
    n = nV + 1
    form = SymBilinearForm(data.V_gram, tol=data.tol)
    if not is_self_adjoint(F, form, data.tol):
        raise NotSelfAdjoint("F is not self-adjoint relative to the V form")
    c = np.zeros((n, n, n))
    c[0, 1:, 1:] = F.T  # [u, e_j] = sum_k F[k, j] e_k
    c[1:, 0, 1:] = -F.T
    gram = data.full_gram()
    if abs(np.linalg.det(gram)) <= data.tol:
        raise DegenerateMetric("metric Gram is singular")
    ce = ge = None
    if data.exact:
        Fe = data.F_exact
        ce = zeros_like_field(QRoot3(0), (n, n, n))
        for j in range(nV):
            for k in range(nV):
                ce[0, 1 + j, 1 + k] = Fe[k, j]
                ce[1 + j, 0, 1 + k] = -Fe[k, j]
        ge = data.full_gram(exact=True)
    labels = ("u",) + tuple(f"e{j}" for j in range(1, n))
    mla = MetricLieAlgebra(c, gram, labels, ce, ge, data.tol)
    defect = mla.jacobi_defect()
    if defect > data.tol:
        raise DegenerateMetric(f"Jacobi identity fails: defect {defect}")
    return mla


@dataclass(frozen=True)
class AffineField:
    """A vector field affine in the chart coordinates: value(x) = A x + b."""

    A: np.ndarray
    b: np.ndarray

    def value(self, point):
        return self.A @ np.asarray(point, dtype=self.A.dtype) + self.b

    def directional(self, other_value):
        """Exact derivative of this field along a vector (affine fields only)."""
        return self.A @ other_value


@dataclass(frozen=True)
class ManifoldModel:
    """The chart M = V x (0, inf) with the simply transitive field algebra.

    Chart coordinates are (x_1, ..., x_{n-1}, t); algebra coefficients are
    over the basis (u, e_1, ..., e_{n-1}).
    """

    data: PetrovData
    mla: MetricLieAlgebra

    @property
    def n(self) -> int:
        return self.data.n

    def field(self, coeffs) -> AffineField:
        """Affine evaluator of the algebra element with the given coefficients."""
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (self.n,):
            raise DimensionMismatch("coefficient vector has wrong length")
        if np.max(np.abs(coeffs.imag)) == 0.0:
            coeffs = coeffs.real
        nV = self.n - 1
        a = coeffs[0]
        A = np.zeros((self.n, self.n), dtype=coeffs.dtype)
        A[:nV, :nV] = -a * self.data.F
        A[nV, nV] = a
        b = np.zeros(self.n, dtype=coeffs.dtype)
        b[:nV] = coeffs[1:]
        return AffineField(A, b)

    def in_chart(self, point) -> bool:
        return float(np.asarray(point)[-1]) > 0.0

    def frame_matrix(self, point) -> np.ndarray:
        """Columns = values of the frame fields (u, e_1, ...) at the point."""
        cols = []
        for i in range(self.n):
            e = np.zeros(self.n)
            e[i] = 1.0
            cols.append(self.field(e).value(point))
        return np.array(cols).T

    def metric_at(self, point) -> np.ndarray:
        """Coordinate components of g at a chart point."""
        phi_inv = np.linalg.inv(self.frame_matrix(point))
        return phi_inv.T @ self.mla.gram @ phi_inv


def build_manifold_model(data: PetrovData) -> ManifoldModel:
    return ManifoldModel(data, build_metric_lie_algebra(data))


def bracket_oracle(model: ManifoldModel, a_coeffs, b_coeffs, points) -> float:
    """Max deviation of d_a b - d_b a from the algebraic bracket at the points.

    All algebra fields are affine in the chart, so the directional derivatives
    are exact; the deviation is zero up to rounding.
    """
    fa = model.field(a_coeffs)
    fb = model.field(b_coeffs)
    alg = model.field(model.mla.bracket(a_coeffs, b_coeffs))
    worst = 0.0
    for pt in points:
        pt = np.asarray(pt, dtype=float)
        lie = fb.directional(fa.value(pt)) - fa.directional(fb.value(pt))
        worst = max(worst, float(np.max(np.abs(lie - alg.value(pt)))))
    return worst


def family_model(
    variant: str,
    p=1.0,
    pm_sign: int = 1,
    delta: int = 1,
    exact: bool = False,
) -> ManifoldModel:
    """Convenience builder: parameters -> manifold model with its algebra."""
    params = ModelFamilyParams(variant, p, pm_sign, delta)
    data = build_family(params, exact=exact)
    return build_manifold_model(data)
