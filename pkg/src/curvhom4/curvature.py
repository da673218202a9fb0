"""Connection and curvature of a metric Lie algebra in its invariant frame.

Everything is frame-algebraic: with constant structure constants and a
constant Gram matrix, the Koszul formula, the curvature tensor, Ricci,
the covariant derivative of R, and sectional curvatures all reduce to
polynomial expressions in those constants.  The same index loops run over
float64 and over exact Q(sqrt 3) scalars.

Closed forms for the [u, v] = Fv algebras (connection, curvature, Ricci,
and the V-direction derivative of R) are provided as independent oracles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMetric, DegeneratePlane
from .exactnum import gauss_inverse, zeros_like_field
from .linalg import TOL
from .models import MetricLieAlgebra, PetrovData


def _is_float(sample) -> bool:
    return isinstance(sample, (float, int, np.floating, np.integer))


def _zeros(sample, shape):
    if _is_float(sample):
        return np.zeros(shape)
    return zeros_like_field(sample, shape)


def _inv(mat):
    if mat.dtype == object:
        return gauss_inverse(mat)
    return np.linalg.inv(mat)


def gen_maxabs(arr) -> float:
    """Max |entry| of a float or object array (object entries define abs)."""
    arr = np.asarray(arr)
    if arr.size == 0:
        return 0.0
    if arr.dtype == object:
        return max(abs(x) for x in arr.ravel())
    return float(np.max(np.abs(arr)))


def _pick(mla: MetricLieAlgebra, exact: bool):
    if exact:
        if not mla.exact:
            raise ValueError("algebra carries no exact data")
        return mla.c_exact, mla.gram_exact
    return mla.c, mla.gram


@dataclass(frozen=True)
class FrameConnection:
    """Levi-Civita coefficients: nabla_{X_a} X_b = gamma[a, b, c] X_c."""

    gamma: np.ndarray
    gamma_exact: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.gamma.shape[0]

    def endo(self, a: int, dtype=float) -> np.ndarray:
        """Matrix of nabla_{X_a} acting on constant-component fields."""
        return np.array(self.gamma[a].T, dtype=dtype)

    def torsion_defect(self, mla: MetricLieAlgebra) -> float:
        d = self.gamma - np.swapaxes(self.gamma, 0, 1) - mla.c
        return gen_maxabs(d)

    def metric_defect(self, mla: MetricLieAlgebra) -> float:
        low = np.einsum("abd,dc->abc", self.gamma, mla.gram)
        return gen_maxabs(low + np.swapaxes(low, 1, 2))


def levi_civita(mla: MetricLieAlgebra, exact: bool = False) -> FrameConnection:
    """Koszul formula for left-invariant fields; derivative terms vanish.

    2 g(nabla_x y, z) = g([x,y],z) - g([y,z],x) + g([z,x],y).
    """
    c, gram = _pick(mla, exact)
    n = mla.dim
    ginv = _inv(gram)
    if not exact and abs(np.linalg.det(mla.gram)) < TOL:
        raise DegenerateMetric("metric Gram is singular")
    half = gram[0, 0] * 0 + 1
    half = half / 2 if exact else 0.5
    low = _zeros(gram[0, 0], (n, n, n))
    for a in range(n):
        for b in range(n):
            for cc in range(n):
                s = gram[0, 0] * 0
                for d in range(n):
                    s = s + c[a, b, d] * gram[d, cc]
                    s = s - c[b, cc, d] * gram[d, a]
                    s = s + c[cc, a, d] * gram[d, b]
                low[a, b, cc] = half * s
    gamma = _zeros(gram[0, 0], (n, n, n))
    for a in range(n):
        for b in range(n):
            for e in range(n):
                s = gram[0, 0] * 0
                for cc in range(n):
                    s = s + low[a, b, cc] * ginv[cc, e]
                gamma[a, b, e] = s
    if exact:
        return FrameConnection(np.vectorize(float)(gamma).astype(float), gamma)
    return FrameConnection(gamma)


@dataclass(frozen=True)
class CurvatureTensor:
    """Fully covariant components R_{abcd} = g(R(X_a, X_b) X_c, X_d)."""

    Rdown: np.ndarray
    Rdown_exact: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.Rdown.shape[0]

    def symmetry_defects(self) -> dict:
        R = self.Rdown
        return {
            "antisym_first_pair": gen_maxabs(R + np.swapaxes(R, 0, 1)),
            "antisym_last_pair": gen_maxabs(R + np.swapaxes(R, 2, 3)),
            "pair_symmetry": gen_maxabs(R - np.transpose(R, (2, 3, 0, 1))),
            "first_bianchi": gen_maxabs(
                R + np.transpose(R, (1, 2, 0, 3)) + np.transpose(R, (2, 0, 1, 3))
            ),
        }


def curvature_tensor(
    conn: FrameConnection, mla: MetricLieAlgebra, exact: bool = False
) -> CurvatureTensor:
    """R(x, y) s = nabla_y nabla_x s - nabla_x nabla_y s + nabla_{[x,y]} s."""
    c, gram = _pick(mla, exact)
    gamma = conn.gamma_exact if exact else conn.gamma
    n = mla.dim
    up = _zeros(gram[0, 0], (n, n, n, n))  # up[a,b,cc,e]: X_e-component of R(X_a,X_b)X_cc
    for a in range(n):
        for b in range(n):
            for cc in range(n):
                for e in range(n):
                    s = gram[0, 0] * 0
                    for d in range(n):
                        s = s + gamma[a, cc, d] * gamma[b, d, e]
                        s = s - gamma[b, cc, d] * gamma[a, d, e]
                        s = s + c[a, b, d] * gamma[d, cc, e]
                    up[a, b, cc, e] = s
    down = _zeros(gram[0, 0], (n, n, n, n))
    for a in range(n):
        for b in range(n):
            for cc in range(n):
                for d in range(n):
                    s = gram[0, 0] * 0
                    for e in range(n):
                        s = s + up[a, b, cc, e] * gram[e, d]
                    down[a, b, cc, d] = s
    if exact:
        return CurvatureTensor(np.vectorize(float)(down).astype(float), down)
    return CurvatureTensor(down)


@dataclass(frozen=True)
class CurvatureSummary:
    """Ricci, scalar curvature, Einstein flags, and the derivative of R."""

    ricci: np.ndarray
    scalar: float
    einstein: bool
    ricci_flat: bool
    nabla_R: np.ndarray
    locally_symmetric: bool
    ricci_exact: np.ndarray | None = None
    nabla_R_exact: np.ndarray | None = None


def ricci_tensor(R: CurvatureTensor, mla: MetricLieAlgebra, exact: bool = False):
    """Ric(u, w) = Trace[v -> R(u, v) w], plus the scalar curvature."""
    _, gram = _pick(mla, exact)
    Rdown = R.Rdown_exact if exact else R.Rdown
    n = mla.dim
    ginv = _inv(gram)
    ric = _zeros(gram[0, 0], (n, n))
    for a in range(n):
        for cc in range(n):
            s = gram[0, 0] * 0
            for b in range(n):
                for e in range(n):
                    s = s + Rdown[a, b, cc, e] * ginv[e, b]
            ric[a, cc] = s
    scal = gram[0, 0] * 0
    for a in range(n):
        for cc in range(n):
            scal = scal + ric[a, cc] * ginv[cc, a]
    return ric, scal


def nabla_R(
    conn: FrameConnection, R: CurvatureTensor, mla: MetricLieAlgebra, exact: bool = False
):
    """Covariant derivative (nabla_{X_e} R)_{abcd}; components are constant,
    so only the four connection corrections survive."""
    _, gram = _pick(mla, exact)
    gamma = conn.gamma_exact if exact else conn.gamma
    Rdown = R.Rdown_exact if exact else R.Rdown
    n = mla.dim
    out = _zeros(gram[0, 0], (n, n, n, n, n))
    for e in range(n):
        for a in range(n):
            for b in range(n):
                for cc in range(n):
                    for d in range(n):
                        s = gram[0, 0] * 0
                        for f in range(n):
                            s = s - gamma[e, a, f] * Rdown[f, b, cc, d]
                            s = s - gamma[e, b, f] * Rdown[a, f, cc, d]
                            s = s - gamma[e, cc, f] * Rdown[a, b, f, d]
                            s = s - gamma[e, d, f] * Rdown[a, b, cc, f]
                        out[e, a, b, cc, d] = s
    return out


def curvature_summary(
    conn: FrameConnection, R: CurvatureTensor, mla: MetricLieAlgebra, tol: float = TOL
) -> CurvatureSummary:
    ric, scal = ricci_tensor(R, mla)
    n = mla.dim
    rscale = 1.0 + gen_maxabs(R.Rdown)
    einstein = gen_maxabs(ric - (scal / n) * mla.gram) <= tol * rscale
    ricci_flat = gen_maxabs(ric) <= tol * rscale
    nr = nabla_R(conn, R, mla)
    locally_symmetric = gen_maxabs(nr) <= tol * rscale
    ric_e = nr_e = None
    if mla.exact and conn.gamma_exact is not None and R.Rdown_exact is not None:
        ric_e, _ = ricci_tensor(R, mla, exact=True)
        nr_e = nabla_R(conn, R, mla, exact=True)
    return CurvatureSummary(ric, float(scal), einstein, ricci_flat, nr, locally_symmetric, ric_e, nr_e)


def sectional_curvature(R: CurvatureTensor, mla: MetricLieAlgebra, x, y, tol: float = TOL) -> float:
    """K of the plane spanned by x, y; requires a nondegenerate plane Gram."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    g = mla.gram
    gxx = x @ g @ x
    gyy = y @ g @ y
    gxy = x @ g @ y
    den = gxx * gyy - gxy * gxy
    scale = max(1.0, float(x @ x), float(y @ y))
    if abs(den) <= tol * scale**2:
        raise DegeneratePlane("plane Gram determinant is zero")
    num = np.einsum("abcd,a,b,c,d->", R.Rdown, x, y, x, y)
    return float(num / den)


# ---------------------------------------------------------------------------
# Closed forms for the [u, v] = Fv algebras, used as independent oracles.
# ---------------------------------------------------------------------------


def petrov_connection(data: PetrovData, exact: bool = False) -> np.ndarray:
    """nabla_u u = nabla_u v = 0, nabla_v u = -Fv, nabla_v w = delta <Fv,w> u."""
    if exact:
        F, gv = data.F_exact, data.V_gram_exact
    else:
        F, gv = data.F, data.V_gram
    n = data.n
    nV = n - 1
    gamma = _zeros(gv[0, 0], (n, n, n))
    gf = _zeros(gv[0, 0], (nV, nV))
    for j in range(nV):
        for k in range(nV):
            s = gv[0, 0] * 0
            for m in range(nV):
                s = s + gv[j, m] * F[m, k]
            gf[j, k] = s  # <e_j, F e_k> = <F e_j, e_k>
    for j in range(nV):
        for k in range(nV):
            gamma[1 + j, 0, 1 + k] = -F[k, j]  # nabla_{e_j} u = -F e_j
            gamma[1 + j, 1 + k, 0] = data.delta * gf[j, k]
    return gamma


def petrov_curvature(data: PetrovData, exact: bool = False) -> np.ndarray:
    """R(u,v)u = -F^2 v, R(v,w)u = 0, R(u,w)v = delta <F^2 w, v> u,
    R(v,v')w = delta <Fv',w> Fv - delta <Fv,w> Fv', lowered with g."""
    if exact:
        F, gv = data.F_exact, data.V_gram_exact
    else:
        F, gv = data.F, data.V_gram
    n = data.n
    nV = n - 1
    zero = gv[0, 0] * 0

    def mat_mul(A, B):
        out = _zeros(zero, (A.shape[0], B.shape[1]))
        for i in range(A.shape[0]):
            for j in range(B.shape[1]):
                s = zero
                for k in range(A.shape[1]):
                    s = s + A[i, k] * B[k, j]
                out[i, j] = s
        return out

    F2 = mat_mul(F, F)
    gF = mat_mul(gv, F)  # gF[j,k] = <e_j, F e_k>
    gF2 = mat_mul(gv, F2)
    down = _zeros(zero, (n, n, n, n))
    # R_{0,j,0,l} = g(R(u,e_j)u, e_l) = -<F^2 e_j, e_l>
    # R_{0,j,k,0} = g(R(u,e_j)e_k, u) = delta <F^2 e_j, e_k> * delta
    for j in range(nV):
        for l in range(nV):
            down[0, 1 + j, 0, 1 + l] = -gF2[l, j]
            down[1 + j, 0, 0, 1 + l] = gF2[l, j]
            down[0, 1 + j, 1 + l, 0] = gF2[l, j]
            down[1 + j, 0, 1 + l, 0] = -gF2[l, j]
    # R_{j,k,l,m} = delta [<F e_k, e_l><F e_j, e_m> - <F e_j, e_l><F e_k, e_m>]
    for j in range(nV):
        for k in range(nV):
            for l in range(nV):
                for m in range(nV):
                    down[1 + j, 1 + k, 1 + l, 1 + m] = data.delta * (
                        gF[l, k] * gF[m, j] - gF[l, j] * gF[m, k]
                    )
    return down


def petrov_ricci(data: PetrovData, exact: bool = False) -> np.ndarray:
    """Ric(u,u) = -tr F^2, Ric(u,v) = 0, Ric(v,w) = -delta <Fv,w> tr F."""
    if exact:
        F, gv = data.F_exact, data.V_gram_exact
    else:
        F, gv = data.F, data.V_gram
    n = data.n
    nV = n - 1
    zero = gv[0, 0] * 0
    ric = _zeros(zero, (n, n))
    trF = zero
    trF2 = zero
    for j in range(nV):
        trF = trF + F[j, j]
        for k in range(nV):
            trF2 = trF2 + F[j, k] * F[k, j]
    ric[0, 0] = -trF2
    for j in range(nV):
        for k in range(nV):
            s = zero
            for m in range(nV):
                s = s + gv[j, m] * F[m, k]
            ric[1 + j, 1 + k] = -data.delta * s * trF
    return ric


def petrov_nabla_r_closed_form(data: PetrovData, exact: bool = False):
    """(w, v, v') -> the vector delta^{-1} RHS of the derivative formula:
    delta (nabla_w R)(u,v)v' = -<F^2 v,v'> Fw + <Fv,v'> F^2 w
                               - <F^2 w,v'> Fv + <Fw,v'> F^2 v  (V arguments)."""
    if exact:
        F, gv = data.F_exact, data.V_gram_exact
    else:
        F, gv = data.F, data.V_gram
    nV = data.n - 1
    zero = gv[0, 0] * 0

    def inner(a, b):
        s = zero
        for i in range(nV):
            for j in range(nV):
                s = s + a[i] * gv[i, j] * b[j]
        return s

    def apply(M, v):
        return np.array([sum((M[i, k] * v[k] for k in range(nV)), zero) for i in range(nV)], dtype=object if exact else float)

    def closed(w, v, vp):
        Fw, Fv = apply(F, w), apply(F, v)
        F2w, F2v = apply(F, Fw), apply(F, Fv)
        rhs = (
            -inner(F2v, vp) * Fw
            + inner(Fv, vp) * F2w
            - inner(F2w, vp) * Fv
            + inner(Fw, vp) * F2v
        )
        # delta^{-1} = delta
        return np.array([data.delta * x for x in rhs], dtype=object if exact else float)

    return closed


def nabla_r_oracle_defect(
    data: PetrovData,
    conn: FrameConnection,
    R: CurvatureTensor,
    mla: MetricLieAlgebra,
    exact: bool = False,
) -> float:
    """Max deviation of the general nabla R from the closed form on V-triples."""
    nr = nabla_R(conn, R, mla, exact=exact)
    gram = mla.gram_exact if exact else mla.gram
    ginv = _inv(gram)
    closed = petrov_nabla_r_closed_form(data, exact=exact)
    n = mla.dim
    nV = n - 1
    zero = gram[0, 0] * 0
    worst = 0.0
    for w in range(nV):
        for v in range(nV):
            for vp in range(nV):
                # vector of (nabla_{e_w} R)(u, e_v) e_vp: raise the last slot
                vec = []
                for m in range(n):
                    s = zero
                    for d in range(n):
                        s = s + nr[1 + w, 0, 1 + v, 1 + vp, d] * ginv[d, m]
                    vec.append(s)
                ew = [zero] * nV
                ev = [zero] * nV
                evp = [zero] * nV
                ew[w] = zero + 1
                ev[v] = zero + 1
                evp[vp] = zero + 1
                rhs = closed(np.array(ew, dtype=object if exact else float),
                             np.array(ev, dtype=object if exact else float),
                             np.array(evp, dtype=object if exact else float))
                worst = max(worst, abs(vec[0]))  # u-component must vanish
                for m in range(nV):
                    worst = max(worst, abs(vec[1 + m] - rhs[m]))
    return worst
