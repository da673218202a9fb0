"""Normalized eigenframes of the self-dual Weyl morphism and their calculus.

On the homogeneous models every section in sight has constant components
over the invariant frame, so exterior derivatives, covariant derivatives and
divergences all reduce to structure-constant algebra; nothing here is ever
differentiated numerically.

The chain implemented: an orthonormal eigenframe (alpha_1, alpha_2, alpha_3)
of the Weyl morphism on E with eps_j alpha_j alpha_j = -Id, the connection
one-forms xi, the diagonal Weyl data (lambda_j, mu_j, theta), the divergence
field w with w_1 = w_2 = w_3, the parallelism criterion, the quadratic
structure equation, the Killing structure (w, v_1, v_2, v_3) with
[w, v_j] = rho_j v_j and rho_j^3 = gamma^2, and the extraction of the real
form that returns the construction data (V, <,>, F, delta, p, +-)."""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bivectors import BivectorSpace, ComplexE, wedge_components
from .curvature import FrameConnection, gen_maxabs
from .errors import (
    DivergenceNotZero,
    FrameExpansionFailure,
    GammaNotReal,
    NotARealForm,
    NotDiagonalizable,
    NullEigenvector,
    NullEigenvectorNorm,
)
from .exactnum import CRoot3, QRoot3, exact_nullspace, fraction_cube_root
from .linalg import TOL, complex_spectrum
from .models import MetricLieAlgebra, PetrovData

CYCLES = ((0, 1, 2), (1, 2, 0), (2, 0, 1))
Q_CBRT = cmath.exp(2j * cmath.pi / 3)


def _arg(z) -> float:
    """Argument in (-pi, pi]; the branch cut maps to +pi for determinism."""
    a = float(np.angle(z))
    if a <= -np.pi + 1e-12:
        a += 2.0 * np.pi
    return a


def _h_endo(a: np.ndarray, b: np.ndarray) -> complex:
    """Complex-bilinear bivector metric in the endomorphism picture."""
    return -np.trace(a @ b) / 2.0


@dataclass(frozen=True)
class OrthoEigenFrame:
    """Weyl eigenframe with eps_j alpha_j alpha_j = -Id and h(a_j,a_j) = 2 eps_j."""

    alphas: tuple  # complex 4x4 endomorphisms
    alphas6: tuple  # complex bivector components
    eps: tuple
    lambdas: tuple
    space: BivectorSpace

    def product_defects(self) -> dict:
        """Defects of the quaternion-like product relations."""
        a = self.alphas
        e = self.eps
        I4 = np.eye(4)
        worst_sq = max(gen_maxabs(e[j] * a[j] @ a[j] + I4) for j in range(3))
        worst_pr = 0.0
        for (j, k, l) in CYCLES:
            worst_pr = max(worst_pr, gen_maxabs(a[j] @ a[k] - e[l] * a[l]))
            worst_pr = max(worst_pr, gen_maxabs(a[j] @ a[k] + a[k] @ a[j]))
        worst_h = 0.0
        for j in range(3):
            for k in range(3):
                want = 2.0 * e[j] if j == k else 0.0
                worst_h = max(worst_h, abs(_h_endo(a[j], a[k]) - want))
        return {"squares": worst_sq, "products": worst_pr, "h_gram": worst_h}


def _h_gs(vectors, hmat, tol):
    """Complex-bilinear Gram-Schmidt with null pivoting inside a cluster."""
    def h(x, y):
        return x @ hmat @ y

    accepted = []
    cands = [np.array(v, dtype=complex) for v in vectors]
    while cands:
        resid = []
        for v in cands:
            r = v.copy()
            for a in accepted:
                r = r - (h(a, r) / h(a, a)) * a
            resid.append(r)
        scores = [abs(h(r, r)) / max(1e-300, float(np.vdot(r, r).real)) for r in resid]
        best = int(np.argmax(scores))
        if scores[best] <= tol:
            found = None
            for i in range(len(resid)):
                for j in range(i + 1, len(resid)):
                    if abs(h(resid[i], resid[j])) > tol * max(
                        1.0, abs(np.vdot(resid[i], resid[j]))
                    ):
                        found = resid[i] + resid[j]
                        best = i
                        break
                if found is not None:
                    break
            if found is None:
                raise NullEigenvector("h-null eigenvector cannot be normalized")
            r = found
        else:
            r = resid[best]
        accepted.append(r * cmath.sqrt(2.0 / h(r, r)))
        cands.pop(best)
    return accepted


def normalized_frame(E: ComplexE, tol: float = TOL) -> OrthoEigenFrame:
    """Scaled eigenframe of the Weyl morphism satisfying the product relations.

    Eigenvectors are h-orthogonalized within eigenvalue clusters and scaled
    to h(a, a) = 2 (so all eps_j = 1, consistent with eps_1 eps_2 eps_3 = 1);
    the frame is ordered by eigenvalue argument, signs are canonicalized, and
    one extra flip fixes the product sign.
    """
    Wp = E.w_plus
    spec = complex_spectrum(Wp, tol)
    if not spec.diagonalizable:
        raise NotDiagonalizable("Weyl morphism on E is not diagonalizable")
    scale = max(1.0, gen_maxabs(Wp))
    vals, vecs = np.linalg.eig(Wp)
    clusters: list[list[int]] = []
    order = sorted(range(3), key=lambda i: (round(_arg(vals[i]), 9), round(abs(vals[i]), 9), i))
    for i in order:
        for cl in clusters:
            if abs(vals[cl[0]] - vals[i]) <= 100 * tol * scale:
                cl.append(i)
                break
        else:
            clusters.append([i])
    coord_vecs = []
    lambdas = []
    for cl in clusters:
        block = _h_gs([vecs[:, i] for i in cl], E.h, tol)
        coord_vecs.extend(block)
        lambdas.extend([complex(np.mean([vals[i] for i in cl]))] * len(cl))
    alphas6 = []
    alphas = []
    for v in coord_vecs:
        comps = E.basis @ v
        # sign canonicalization on the leading component
        lead = next(
            (c for c in comps if abs(c) > tol * max(1.0, gen_maxabs(np.abs(comps)))), None
        )
        if lead is not None and (lead.real < -tol or (abs(lead.real) <= tol and lead.imag < 0)):
            comps = -comps
        alphas6.append(comps)
        alphas.append(np.asarray(E.space.to_endo(comps), dtype=complex))
    # fix the product sign with at most one flip of alpha_3
    d = _h_endo(alphas[0] @ alphas[1], alphas[2]) / 2.0
    if abs(d + 1.0) < abs(d - 1.0):
        alphas[2] = -alphas[2]
        alphas6[2] = -alphas6[2]
    frame = OrthoEigenFrame(
        tuple(alphas), tuple(alphas6), (1, 1, 1), tuple(lambdas), E.space
    )
    defects = frame.product_defects()
    worst = max(defects.values())
    if worst > 1e5 * tol * (1.0 + scale):
        raise FrameExpansionFailure(f"frame product defects too large: {defects}")
    return frame


@dataclass(frozen=True)
class ConnectionOneForms:
    """Connection one-forms of the frame: nabla alpha_j = xi_j^l (x) alpha_l.

    xi_upper[j, l, a] = xi_j^l(X_a); xi[j, a] = the reduced forms with
    xi_j^k = eps_j xi_l, xi_j^l = -eps_j xi_k on cyclic triples."""

    xi_upper: np.ndarray
    xi: np.ndarray
    expansion_defect: float
    relation_defect: float


def connection_forms(
    frame: OrthoEigenFrame, conn: FrameConnection, mla: MetricLieAlgebra, tol: float = TOL
) -> ConnectionOneForms:
    """Read off the one-forms from nabla_a alpha_j = [Gamma_a, alpha_j]."""
    n = mla.dim
    xi_upper = np.zeros((3, 3, n), dtype=complex)
    worst_resid = 0.0
    for a in range(n):
        Ga = np.asarray(conn.endo(a), dtype=complex)
        for j in range(3):
            D = Ga @ frame.alphas[j] - frame.alphas[j] @ Ga
            recon = np.zeros((4, 4), dtype=complex)
            for l in range(3):
                coeff = _h_endo(D, frame.alphas[l]) / (2.0 * frame.eps[l])
                xi_upper[j, l, a] = coeff
                recon = recon + coeff * frame.alphas[l]
            worst_resid = max(worst_resid, gen_maxabs(D - recon))
    scale = 1.0 + gen_maxabs(xi_upper)
    if worst_resid > 1e4 * tol * scale:
        raise FrameExpansionFailure(f"nabla alpha leaves the frame span: {worst_resid}")
    # reduced forms: xi_l := eps_j xi_j^k on the cyclic triple (j, k, l)
    xi = np.zeros((3, n), dtype=complex)
    for (j, k, l) in CYCLES:
        xi[l] = frame.eps[j] * xi_upper[j, k]
    rel = 0.0
    for j in range(3):
        rel = max(rel, gen_maxabs(xi_upper[j, j]))
    for (j, k, l) in CYCLES:
        rel = max(rel, gen_maxabs(xi_upper[j, k] - frame.eps[j] * xi[l]))
        rel = max(rel, gen_maxabs(xi_upper[j, l] + frame.eps[j] * xi[k]))
    return ConnectionOneForms(xi_upper, xi, worst_resid, rel)


@dataclass(frozen=True)
class WeylDiagonalData:
    """Components of the Weyl morphism in the frame, and theta = nabla W."""

    W: np.ndarray  # 3x3 complex: W alpha_j = W_j^k alpha_k
    lambdas: tuple
    mus: tuple
    theta: np.ndarray  # [j, l, a] = theta_j^l(X_a)
    expansion_defect: float
    mu_consistency: float


def weyl_components(
    frame: OrthoEigenFrame, weyl_op6: np.ndarray, forms: ConnectionOneForms, tol: float = TOL
) -> WeylDiagonalData:
    """W_j^k from the 6x6 Weyl operator, plus the derivative components
    theta_j^l = dW_j^l + W_j^k xi_k^l - W_k^l xi_j^k with constant W_j^l."""
    g6 = frame.space.gram6.astype(complex)
    W6 = np.asarray(weyl_op6, dtype=complex)
    Wmat = np.zeros((3, 3), dtype=complex)
    worst = 0.0
    for j in range(3):
        img = W6 @ frame.alphas6[j]
        recon = np.zeros(6, dtype=complex)
        for l in range(3):
            coeff = (img @ g6 @ frame.alphas6[l]) / (2.0 * frame.eps[l])
            Wmat[j, l] = coeff
            recon = recon + coeff * frame.alphas6[l]
        worst = max(worst, gen_maxabs(img - recon))
    lambdas = tuple(Wmat[j, j] for j in range(3))
    mus = []
    mu_cons = 0.0
    for j in range(3):
        k, l = [x for x in range(3) if x != j]
        m1 = frame.eps[l] * Wmat[k, l]
        m2 = frame.eps[k] * Wmat[l, k]
        mu_cons = max(mu_cons, abs(m1 - m2))
        mus.append((m1 + m2) / 2.0)
    n = forms.xi_upper.shape[2]
    theta = np.zeros((3, 3, n), dtype=complex)
    for j in range(3):
        for l in range(3):
            acc = np.zeros(n, dtype=complex)
            for k in range(3):
                acc = acc + Wmat[j, k] * forms.xi_upper[k, l] - Wmat[k, l] * forms.xi_upper[j, k]
            theta[j, l] = acc
    return WeylDiagonalData(Wmat, lambdas, tuple(mus), theta, worst, mu_cons)


@dataclass(frozen=True)
class DivergenceResult:
    """Both routes to div W = 0 and the common divergence field."""

    w: np.ndarray  # complex frame components
    w_fields: tuple  # the three candidate fields w_j
    route_theta: float  # max |alpha_k theta_j^k| over j
    route_reduced: float  # max |alpha_j [w_k - w_l]| over cyclic triples
    spread: float  # max |w_j - w_k|


def divergence_check(
    data: WeylDiagonalData,
    forms: ConnectionOneForms,
    frame: OrthoEigenFrame,
    mla: MetricLieAlgebra,
    tol: float = TOL,
) -> DivergenceResult:
    """div W = 0 via the theta contraction and via the reduced fields w_j.

    w_j = 2 mu_j xi_j + alpha_j[ eps_k eps_l (lambda_k - lambda_l) xi_j
          + eps_k mu_k xi_l - eps_l mu_l xi_k ]  (constant lambda, mu)."""
    ginv = np.linalg.inv(mla.gram).astype(complex)
    lam = data.lambdas
    mu = data.mus
    eps = frame.eps
    route1 = 0.0
    for j in range(3):
        acc = np.zeros(mla.dim, dtype=complex)
        for k in range(3):
            acc = acc + frame.alphas[k] @ (ginv @ data.theta[j, k])
        route1 = max(route1, gen_maxabs(acc))
    ws = []
    for (j, k, l) in CYCLES:
        cov = (
            eps[k] * eps[l] * (lam[k] - lam[l]) * forms.xi[j]
            + eps[k] * mu[k] * forms.xi[l]
            - eps[l] * mu[l] * forms.xi[k]
        )
        wj = 2.0 * mu[j] * (ginv @ forms.xi[j]) + frame.alphas[j] @ (ginv @ cov)
        ws.append(wj)
    ws_by_index = [None, None, None]
    for (j, _, _), wj in zip(CYCLES, ws):
        ws_by_index[j] = wj
    route2 = 0.0
    spread = 0.0
    for (j, k, l) in CYCLES:
        route2 = max(route2, gen_maxabs(frame.alphas[j] @ (ws_by_index[k] - ws_by_index[l])))
        spread = max(spread, gen_maxabs(ws_by_index[k] - ws_by_index[l]))
    scale = 1.0 + max(gen_maxabs(data.W), gen_maxabs(forms.xi))
    if route1 > 1e5 * tol * scale:
        raise DivergenceNotZero(f"theta route gives nonzero divergence: {route1}")
    w = (ws_by_index[0] + ws_by_index[1] + ws_by_index[2]) / 3.0
    return DivergenceResult(w, tuple(ws_by_index), route1, route2, spread)


def parallel_criterion(
    data: WeylDiagonalData, forms: ConnectionOneForms, frame: OrthoEigenFrame, tol: float = TOL
) -> tuple:
    """Covector equations equivalent to nabla W = 0 for constant components.

    Returns (flag, max_defect_of_equations, direct_nabla_W_maxabs)."""
    lam = data.lambdas
    mu = data.mus
    eps = frame.eps
    dev = 0.0
    pairs = [(0, 1), (1, 2), (2, 0)]
    for (a, b) in pairs:
        dev = max(dev, gen_maxabs(mu[a] * forms.xi[a] - mu[b] * forms.xi[b]))
    for j in range(3):
        for k in range(3):
            for l in range(3):
                if {j, k, l} != {0, 1, 2}:
                    continue
                eqn = (
                    (lam[k] - lam[l]) * forms.xi[j]
                    + eps[l] * mu[k] * forms.xi[l]
                    - eps[k] * mu[l] * forms.xi[k]
                )
                dev = max(dev, gen_maxabs(eqn))
    direct = gen_maxabs(data.theta)
    scale = 1.0 + gen_maxabs([abs(x) for x in lam]) + gen_maxabs(forms.xi)
    flag = dev <= 100 * tol * scale
    return flag, dev, direct


def structure_equation_check(
    forms: ConnectionOneForms,
    frame: OrthoEigenFrame,
    mla: MetricLieAlgebra,
    weyl_op6: np.ndarray,
    scalar: float,
    tol: float = TOL,
) -> float:
    """d xi_j + eps_j xi_k ^ xi_l = -(W + s/12) alpha_j as frame two-forms.

    With constant components d xi (x, y) = -xi([x, y])."""
    n = mla.dim
    g4 = mla.gram.astype(complex)
    W6 = np.asarray(weyl_op6, dtype=complex)
    worst = 0.0
    for (j, k, l) in CYCLES:
        rhs6 = -(W6 @ frame.alphas6[j] + (scalar / 12.0) * frame.alphas6[j])
        rhs_endo = np.asarray(frame.space.to_endo(rhs6), dtype=complex)
        rhs_form = rhs_endo.T @ g4
        for a in range(n):
            for b in range(n):
                dxi = -(forms.xi[j] @ mla.c[a, b])
                wedge = frame.eps[j] * (
                    forms.xi[k][a] * forms.xi[l][b] - forms.xi[k][b] * forms.xi[l][a]
                )
                worst = max(worst, abs(dxi + wedge - rhs_form[a, b]))
    return worst


@dataclass(frozen=True)
class KillingStructure:
    """Orthogonal commuting structure (w, v_1, v_2, v_3): g(w,w) = g(v_j,v_j)
    = gamma, [w, v_j] = rho_j v_j with rho_j the cubic roots of gamma^2."""

    w: np.ndarray  # complex frame components
    vs: tuple  # three complex frame component vectors
    gamma: complex
    rhos: tuple
    scaled: bool = True
    w_exact: object = None
    vs_exact: tuple | None = None
    gamma_exact: object = None
    rhos_exact: tuple | None = None

    def relation_defects(self, mla: MetricLieAlgebra) -> dict:
        g4 = mla.gram.astype(complex)
        dev_gram = abs(self.w @ g4 @ self.w - self.gamma)
        for v in self.vs:
            if self.scaled:
                dev_gram = max(dev_gram, abs(v @ g4 @ v - self.gamma))
            dev_gram = max(dev_gram, abs(self.w @ g4 @ v))
        for i in range(3):
            for j in range(i + 1, 3):
                dev_gram = max(dev_gram, abs(self.vs[i] @ g4 @ self.vs[j]))
        dev_bracket = 0.0
        for rho, v in zip(self.rhos, self.vs):
            dev_bracket = max(
                dev_bracket, gen_maxabs(mla.bracket(self.w, v) - rho * v)
            )
        for i in range(3):
            for j in range(3):
                dev_bracket = max(dev_bracket, gen_maxabs(mla.bracket(self.vs[i], self.vs[j])))
        dev_cubic = max(abs(r**3 - self.gamma**2) for r in self.rhos)
        return {"gram": dev_gram, "bracket": dev_bracket, "cubic_roots": dev_cubic}


def _croot3_sqrt(z: CRoot3):
    """Square root inside Q(sqrt3, i) for the cases arising here, else None."""
    if not z.im.is_zero():
        return None
    if not z.re.is_rational():
        return None
    r = z.re.a
    neg = r < 0
    r = -r if neg else r
    num = Fraction(r).numerator
    den = Fraction(r).denominator
    sn, sd = _isqrt(num), _isqrt(den)
    if sn is None or sd is None:
        return None
    root = QRoot3(Fraction(sn, sd))
    return CRoot3(QRoot3(0), root) if neg else CRoot3(root, QRoot3(0))


def _isqrt(k: int):
    r = int(round(k**0.5))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c * c == k:
            return c
    return None


def build_killing_structure(
    data: PetrovData, mla: MetricLieAlgebra, tol: float = TOL, exact: bool = False
) -> KillingStructure:
    """The structure for the cube-root family: w = p^3 u, v_j scaled
    eigenvectors of ad u on the complexified translation space.

    gamma = g(w,w) = delta p^6 and rho_j = p^4 {1, q, conj q}, whose cubes
    are gamma^2 = p^12.
    """
    F = data.F
    nV = F.shape[0]
    F3 = F @ F @ F
    p = float(np.cbrt(F3[0, 0]))
    if abs(p) <= tol:
        raise NullEigenvectorNorm("cube-root parameter is zero")
    if gen_maxabs(F3 - p**3 * np.eye(nV)) > tol * max(1.0, abs(p) ** 3):
        raise NotDiagonalizable("F^3 is not a scalar; not a cube-root family operator")
    vals, vecs = np.linalg.eig(F.astype(complex))
    targets = [p, p * Q_CBRT, p * np.conj(Q_CBRT)]
    used = set()
    picks = []
    for t in targets:
        i = min(
            (i for i in range(nV) if i not in used), key=lambda i: abs(vals[i] - t)
        )
        if abs(vals[i] - t) > 1e3 * tol * max(1.0, abs(p)):
            raise NotDiagonalizable("eigenvalues do not form the cube-root triple")
        used.add(i)
        picks.append(vecs[:, i])
    gamma = data.delta * p**6
    g4 = mla.gram.astype(complex)
    w = np.zeros(nV + 1, dtype=complex)
    w[0] = p**3
    vs = []
    for v3 in picks:
        v = np.zeros(nV + 1, dtype=complex)
        v[1:] = v3
        g0 = v @ g4 @ v
        if abs(g0) <= tol * float(np.vdot(v, v).real):
            raise NullEigenvectorNorm("eigenvector has null self inner product")
        vs.append(v * cmath.sqrt(gamma / g0))
    rhos = tuple(p**3 * t for t in targets)
    order = sorted(range(3), key=lambda i: (round(_arg(rhos[i]), 9), i))
    vs = [vs[i] for i in order]
    rhos = tuple(rhos[i] for i in order)
    ks = KillingStructure(w, tuple(vs), gamma, rhos)
    if exact:
        if not data.exact:
            raise ValueError("exact Killing structure needs exact model data")
        ks = _exact_killing(data, mla, ks)
    return ks


def _exact_killing(data: PetrovData, mla: MetricLieAlgebra, ks: KillingStructure) -> KillingStructure:
    """Exact eigen-data over Q(sqrt3, i); scales the v_j only when the square
    root of gamma / g(v, v) lies in the field."""
    Fe = data.F_exact
    nV = Fe.shape[0]
    F3 = Fe @ Fe @ Fe
    if not all(F3[i, j] == (F3[0, 0] if i == j else QRoot3(0)) for i in range(nV) for j in range(nV)):
        raise NotDiagonalizable("exact F^3 is not scalar")
    cube = F3[0, 0]
    if not cube.is_rational():
        raise NotDiagonalizable("exact cube of the parameter is irrational")
    p = fraction_cube_root(cube.a)
    if p is None:
        raise NotDiagonalizable("p^3 is not a rational cube")
    pC = CRoot3(QRoot3(p))
    omega = CRoot3.omega()
    Fc = np.array([[CRoot3(Fe[i, j]) for j in range(nV)] for i in range(nV)], dtype=object)
    gamma_e = CRoot3(QRoot3(Fraction(data.delta) * p**6))
    ge = mla.gram_exact
    g4c = np.array(
        [[CRoot3(ge[i, j]) for j in range(mla.dim)] for i in range(mla.dim)], dtype=object
    )
    w_e = np.empty(nV + 1, dtype=object)
    w_e[...] = CRoot3(0)
    w_e[0] = CRoot3(QRoot3(p**3))
    vs_e = []
    rhos_e = []
    scaled_all = True
    for lam in (pC, pC * omega, pC * omega.conj()):
        M = np.array(
            [
                [Fc[i, j] - (lam if i == j else CRoot3(0)) for j in range(nV)]
                for i in range(nV)
            ],
            dtype=object,
        )
        kern = exact_nullspace(M)
        if len(kern) != 1:
            raise NotDiagonalizable("exact eigenspace is not one-dimensional")
        v = np.empty(nV + 1, dtype=object)
        v[...] = CRoot3(0)
        for i in range(nV):
            v[1 + i] = kern[0][i]
        g0 = CRoot3(0)
        for i in range(nV + 1):
            for j in range(nV + 1):
                g0 = g0 + v[i] * g4c[i, j] * v[j]
        if g0.is_zero():
            raise NullEigenvectorNorm("exact eigenvector is null")
        c = _croot3_sqrt(gamma_e / g0)
        if c is None:
            scaled_all = False
        else:
            v = np.array([c * x for x in v], dtype=object)
        vs_e.append(v)
        rhos_e.append(CRoot3(QRoot3(p**3)) * lam)
    order = sorted(
        range(3), key=lambda i: (round(_arg(complex(rhos_e[i])), 9), i)
    )
    return KillingStructure(
        ks.w,
        ks.vs,
        ks.gamma,
        ks.rhos,
        scaled=ks.scaled,
        w_exact=w_e,
        vs_exact=tuple(vs_e[i] for i in order),
        gamma_exact=gamma_e,
        rhos_exact=tuple(rhos_e[i] for i in order),
    )


# ---------------------------------------------------------------------------
# The identity battery around the divergence field.
# ---------------------------------------------------------------------------


def nabla_endo(conn: FrameConnection, w, mla: MetricLieAlgebra) -> np.ndarray:
    """P = nabla w as an endomorphism: P X_a = nabla_{X_a} w."""
    n = mla.dim
    w = np.asarray(w, dtype=complex)
    P = np.zeros((n, n), dtype=complex)
    for a in range(n):
        for cc in range(n):
            P[cc, a] = np.dot(conn.gamma[a, :, cc], w)
    return P


def metric_adjoint(P: np.ndarray, mla: MetricLieAlgebra) -> np.ndarray:
    g = mla.gram.astype(complex)
    return np.linalg.inv(g) @ P.T @ g


def identity_battery(
    frame: OrthoEigenFrame,
    forms: ConnectionOneForms,
    data: WeylDiagonalData,
    div: DivergenceResult,
    conn: FrameConnection,
    mla: MetricLieAlgebra,
    scalar: float,
    ks: KillingStructure | None = None,
    tol: float = TOL,
) -> list:
    """Numerical checks of the eigenframe identity chain on one model.

    Returns rows (name, deviation, passed, note).  Scale-degenerate branches
    (everything multiplied by phi = 0 on parallel models) are reported as
    passing with a note."""
    rows = []
    g4 = mla.gram.astype(complex)
    ginv = np.linalg.inv(g4)
    lam = data.lambdas
    eps = frame.eps
    w = div.w
    scale = 1.0 + max(abs(x) for x in lam) ** 3 + gen_maxabs(w) ** 2

    def add(name, dev, note="", thresh=None):
        t = (1e3 * tol * scale) if thresh is None else thresh
        rows.append((name, float(dev), bool(dev <= t), note))

    vs = [frame.alphas[j] @ w for j in range(3)]
    ww = w @ g4 @ w
    phi = (lam[0] - lam[1]) * (lam[1] - lam[2]) * (lam[2] - lam[0])
    degenerate = abs(phi) <= tol * scale

    # relations (13) for the divergence field
    dev = 0.0
    for j in range(3):
        for k in range(3):
            want = eps[j] * ww if j == k else 0.0
            dev = max(dev, abs(vs[j] @ g4 @ vs[k] - want))
        dev = max(dev, abs(w @ g4 @ vs[j]))
        dev = max(dev, gen_maxabs(frame.alphas[j] @ vs[j] + eps[j] * w))
    for (j, k, l) in CYCLES:
        dev = max(dev, gen_maxabs(frame.alphas[j] @ vs[k] - eps[l] * vs[l]))
        dev = max(dev, gen_maxabs(frame.alphas[k] @ vs[j] + eps[l] * vs[l]))
    add("frame_field_relations", dev)

    # v_j corresponds to (lambda_l - lambda_k) xi_j, and xi_j(w) = 0
    dev = 0.0
    for (j, k, l) in CYCLES:
        dev = max(dev, gen_maxabs(g4 @ vs[j] - (lam[l] - lam[k]) * forms.xi[j]))
        dev = max(dev, abs(forms.xi[j] @ w))
    add("divergence_field_duality", dev)

    P = nabla_endo(conn, w, mla)
    Pstar = metric_adjoint(P, mla)

    # exterior derivative of the metric dual of w
    dev = 0.0
    wflat = g4 @ w
    pdiff = (P - Pstar).T @ g4
    for a in range(mla.dim):
        for b in range(mla.dim):
            dw_ab = -np.dot(mla.c[a, b], wflat)
            dev = max(dev, abs(dw_ab - pdiff[a, b]))
    add("dw_equals_p_minus_pstar", dev)
    add("pstar_w_vanishes", gen_maxabs(Pstar @ w))

    # quadratic relation for P_j = alpha_j P + P* alpha_j
    dev = 0.0
    for (j, k, l) in CYCLES:
        Pj = frame.alphas[j] @ P + Pstar @ frame.alphas[j]
        vkvl = np.asarray(
            frame.space.to_endo(wedge_components(vs[k], vs[l])), dtype=complex
        )
        lhs = (lam[j] - lam[k]) * (lam[j] - lam[l]) * Pj + 2.0 * eps[j] * (
            lam[k] - lam[l]
        ) * vkvl
        rhs = -(lam[j] + scalar / 12.0) * phi * frame.alphas[j]
        dev = max(dev, gen_maxabs(lhs - rhs))
    add("quadratic_p_relation", dev)

    # parallel iff phi = 0
    flag, crit_dev, direct = parallel_criterion(data, forms, frame, tol)
    consistent = flag == degenerate
    rows.append(
        (
            "parallel_iff_phi_zero",
            float(abs(phi) if flag else 0.0),
            bool(consistent),
            f"phi={phi:.3e}, parallel={flag}",
        )
    )

    if degenerate:
        add("eigenvalue_distinctness", 0.0, note="skipped: parallel branch")
        add("nabla_w_eigenvector", gen_maxabs(P @ np.array(vs).T))
        add("divergence_of_w", abs(np.trace(P)))
        add("scalar_vanishes", 0.0, note="skipped: parallel branch")
        add("eigenvalue_ratio_cube_root", 0.0, note="skipped: parallel branch")
        add("eigenvalue_difference_sqrt3", 0.0, note="skipped: parallel branch")
        add("bracket_w_v", gen_maxabs([mla.bracket(w, v) for v in vs]))
        add("bracket_v_v", 0.0, note="abelian translations")
        add("lambda_cubed_is_minus_gamma", 0.0, note="skipped: parallel branch")
        return rows

    dev = min(
        abs(lam[0] - lam[1]), abs(lam[1] - lam[2]), abs(lam[2] - lam[0])
    )
    rows.append(("eigenvalue_distinctness", float(dev), bool(dev > tol * scale), ""))

    dev = 0.0
    for (j, k, l) in CYCLES:
        dev = max(dev, gen_maxabs(P @ vs[j] - lam[j] * (lam[k] - lam[l]) * vs[j]))
    add("nabla_w_eigenvector", dev)
    add("divergence_of_w", abs(np.trace(P)))
    add("scalar_vanishes", abs(scalar))

    # lambda_k = z lambda_j, lambda_l = conj(z) lambda_j with z a cube root
    zs = [lam[k] / lam[j] for (j, k, l) in CYCLES]
    zdev = max(abs(z - zs[0]) for z in zs)
    z = zs[0]
    zdev = max(zdev, min(abs(z - Q_CBRT), abs(z - np.conj(Q_CBRT))))
    for (j, k, l) in CYCLES:
        zdev = max(zdev, abs(lam[l] - np.conj(z) * lam[j]))
    add("eigenvalue_ratio_cube_root", zdev)

    sq3 = np.sqrt(3.0)
    signs = [
        (lam[k] - lam[l]) / (1j * sq3 * lam[j]) for (j, k, l) in CYCLES
    ]
    sdev = max(min(abs(s - 1.0), abs(s + 1.0)) for s in signs)
    realized = "+" if abs(signs[0] - 1.0) < abs(signs[0] + 1.0) else "-"
    add("eigenvalue_difference_sqrt3", sdev, note=f"realized sign {realized}")

    dev = 0.0
    for (j, k, l) in CYCLES:
        dev = max(dev, gen_maxabs(mla.bracket(w, vs[j]) - lam[j] * (lam[l] - lam[k]) * vs[j]))
    add("bracket_w_v", dev)
    dev = 0.0
    for i in range(3):
        for j in range(3):
            dev = max(dev, gen_maxabs(mla.bracket(vs[i], vs[j])))
    add("bracket_v_v", dev)

    gamma_proof = -ww / 3.0
    dev = max(abs(l**3 + gamma_proof) for l in lam)
    note = ""
    if ks is not None:
        dev_ks = abs(gamma_proof - ks.gamma)
        dev = max(dev, dev_ks)
        note = "matches the Killing-structure gamma"
    add("lambda_cubed_is_minus_gamma", dev, note=note)
    return rows


# ---------------------------------------------------------------------------
# Extraction of the real form from a Killing structure.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RealFormWitness:
    """The construction data recovered from (w, v_j) and a real form."""

    psi: np.ndarray  # complex functional components on the frame
    V_basis: np.ndarray  # columns: real basis of V inside the frame
    u: np.ndarray  # real frame components, |gamma|^{-1/2} w
    delta: int
    F: np.ndarray  # matrix of ad u restricted to V (in the V basis)
    V_gram: np.ndarray
    p: float
    pm_sign: int
    roots: tuple
    identification: np.ndarray  # V basis -> C x R coordinates (3x3 real)
    identification_defect: float
    p_exact: Fraction | None = None
    roots_exact: tuple | None = None


def extract_real_form(
    ks: KillingStructure,
    X_basis: np.ndarray,
    mla: MetricLieAlgebra,
    tol: float = TOL,
    exact: bool = False,
) -> RealFormWitness:
    """Recover (V, <,>, F, delta, p, +-) from the Killing structure.

    X_basis columns span a real form of the complexified algebra; the
    functional psi kills the v_j and takes 1 on w.  V = X /\\ ker(psi),
    u = |gamma|^{-1/2} w, delta = sgn(gamma), F = ad u restricted to V.
    The identification sends the eigen-data (xi, eta, zeta) to
    ((c, 0), (-ic, 0), (0, 1)) with c^2 = -<xi, eta> + i <xi, xi>.
    """
    n = mla.dim
    X = np.asarray(X_basis, dtype=float)
    if X.shape != (n, n) or abs(np.linalg.det(X)) <= tol:
        raise NotARealForm("X does not span the algebra over C")
    g4 = mla.gram.astype(complex)
    # realness of the restricted metric and bracket closure with real constants
    dev = 0.0
    Xinv = np.linalg.inv(X)
    for i in range(n):
        for j in range(n):
            dev = max(dev, abs((X[:, i] @ g4 @ X[:, j]).imag))
            br = mla.bracket(X[:, i], X[:, j])
            coeffs = Xinv @ br
            dev = max(dev, gen_maxabs(np.imag(coeffs)))
    if dev > 1e3 * tol:
        raise NotARealForm(f"metric or bracket is not real on X: {dev}")

    B = np.column_stack([ks.w, *ks.vs])
    psi = np.linalg.solve(B.T, np.array([1.0, 0, 0, 0], dtype=complex))
    # w must lie in X
    wx = np.linalg.solve(X.astype(complex), ks.w)
    if gen_maxabs(wx.imag) > 1e3 * tol * (1.0 + gen_maxabs(wx)):
        raise NotARealForm("w is not in the real form")

    # V = X /\ ker psi: kernel of the real-linear map a -> psi(X a)
    psiX = psi @ X  # complex row of length n
    Mreal = np.vstack([psiX.real, psiX.imag])
    _, s_svd, vt = np.linalg.svd(Mreal)
    rank = int(np.sum(s_svd > tol * max(1.0, s_svd[0])))
    kernel = vt[rank:]
    if kernel.shape[0] != n - 1:
        raise NotARealForm(
            f"psi restricted to X has kernel of dimension {kernel.shape[0]}, expected {n - 1}"
        )
    V_basis = X @ kernel.T  # columns in frame coordinates

    gamma = complex(ks.w @ g4 @ ks.w)
    if abs(gamma.imag) > 1e3 * tol * (1.0 + abs(gamma)):
        raise GammaNotReal(f"gamma = {gamma} is not real")
    if abs(gamma.real) <= tol:
        raise GammaNotReal("gamma vanishes")
    delta = 1 if gamma.real > 0 else -1
    u_vec = (abs(gamma.real) ** -0.5) * ks.w.real

    adu = mla.ad(u_vec)
    # restrict to V: ad u V must stay in V
    sol, res, *_ = np.linalg.lstsq(V_basis, adu @ V_basis, rcond=None)
    resid = gen_maxabs(V_basis @ sol - adu @ V_basis)
    if resid > 1e3 * tol * (1.0 + gen_maxabs(adu)):
        raise NotARealForm(f"ad u does not preserve V: {resid}")
    F = sol
    V_gram = V_basis.T @ mla.gram @ V_basis

    vals = np.linalg.eigvals(F)
    real_idx = [i for i in range(3) if abs(vals[i].imag) <= 1e3 * tol * (1 + abs(vals[i]))]
    if len(real_idx) != 1:
        raise NotARealForm("F does not have exactly one real characteristic root")
    p = float(vals[real_idx[0]].real)
    roots = tuple(sorted((complex(v) for v in vals), key=lambda z: round(_arg(z), 9)))

    # eigen-data: zeta for p (real), xi + i eta for p q
    _, vecs = np.linalg.eig(F.astype(complex))
    order = np.argsort([abs(v - p) for v in vals])
    zeta = vecs[:, order[0]]
    zeta = (zeta / zeta[np.argmax(np.abs(zeta))]).real
    mq = min(range(3), key=lambda i: abs(vals[i] - p * Q_CBRT))
    m = vecs[:, mq]
    xi, eta = m.real.copy(), m.imag.copy()

    def vform(a, b):
        return float(np.real(a @ V_gram @ b)) if np.isrealobj(a) and np.isrealobj(b) else a @ V_gram @ b

    s0 = vform(zeta, zeta)
    if abs(s0) <= tol:
        raise NotARealForm("real eigenvector is null")
    pm_sign = 1 if s0 > 0 else -1
    zeta = zeta / np.sqrt(abs(s0))

    c2 = -vform(xi, eta) + 1j * vform(xi, xi)
    c = cmath.sqrt(c2)
    if abs(c) <= tol:
        raise NotARealForm("normalizing constant vanishes")

    # identification phi: V -> C x R sending xi, eta, zeta to
    # (c, 0), (-ic, 0), (0, 1); matrix in the V basis.
    T = np.column_stack([xi, eta, zeta])  # V-basis coords of the eigen data
    img = np.array(
        [
            [c.real, (-1j * c).real, 0.0],
            [c.imag, (-1j * c).imag, 0.0],
            [0.0, 0.0, 1.0],
        ]
    )
    phi = img @ np.linalg.inv(T)

    from .models import diagonalizable_F, standard_inner_product

    G_std = standard_inner_product(pm_sign)
    F_std = diagonalizable_F(p)
    dev_form = gen_maxabs(phi.T @ G_std @ phi - V_gram)
    dev_F = gen_maxabs(phi @ F - F_std @ phi)
    ident_defect = max(dev_form, dev_F)

    p_exact = roots_exact = None
    if exact:
        p_exact, roots_exact = _extract_exact(ks, X_basis, mla)
        delta_e, pm_e = _extract_exact_signs(ks, X_basis, mla)
        if delta_e != delta or pm_e != pm_sign:
            raise NotARealForm("exact and floating sign recoveries disagree")

    return RealFormWitness(
        psi,
        V_basis,
        u_vec,
        delta,
        F,
        V_gram,
        p,
        pm_sign,
        roots,
        phi,
        float(ident_defect),
        p_exact,
        roots_exact,
    )


def _exact_killing_frame(ks: KillingStructure, mla: MetricLieAlgebra):
    if ks.w_exact is None or ks.vs_exact is None:
        raise ValueError("Killing structure carries no exact data")
    if not mla.exact:
        raise ValueError("algebra carries no exact data")


def _exact_bracket(mla: MetricLieAlgebra, x, y):
    n = mla.dim
    ce = mla.c_exact
    out = np.empty(n, dtype=object)
    out[...] = CRoot3(0)
    for i in range(n):
        for j in range(n):
            if isinstance(x[i], CRoot3) or isinstance(y[j], CRoot3):
                xi = x[i] if isinstance(x[i], CRoot3) else CRoot3(x[i])
                yj = y[j] if isinstance(y[j], CRoot3) else CRoot3(y[j])
            else:
                xi, yj = CRoot3(x[i]), CRoot3(y[j])
            if xi.is_zero() or yj.is_zero():
                continue
            for k in range(n):
                out[k] = out[k] + xi * yj * CRoot3(ce[i, j, k])
    return out


def _extract_exact(ks: KillingStructure, X_basis: np.ndarray, mla: MetricLieAlgebra):
    """Exact recovery of p and the characteristic root set over Q(sqrt3, i)."""
    _exact_killing_frame(ks, mla)
    n = mla.dim
    # psi and V: with X the identity frame and ker psi = span(v_j), the
    # kernel computation runs over the exact field.
    B = np.empty((n, n), dtype=object)
    cols = [ks.w_exact, *ks.vs_exact]
    for j, col in enumerate(cols):
        for i in range(n):
            B[i, j] = col[i] if isinstance(col[i], CRoot3) else CRoot3(col[i])
    # w-coefficient of gamma: gamma = g(w, w)
    ge = mla.gram_exact
    gamma = CRoot3(0)
    for i in range(n):
        for j in range(n):
            gamma = gamma + B[i, 0] * CRoot3(ge[i, j]) * B[j, 0]
    if not gamma.im.is_zero():
        raise GammaNotReal("exact gamma is not real")
    # u = |gamma|^{-1/2} w must stay in the field: |gamma|^{1/2} = |p|^3
    if not gamma.re.is_rational():
        raise NotARealForm("exact gamma is irrational")
    root = _rational_sqrt(abs(gamma.re.a))
    if root is None:
        raise NotARealForm("|gamma| is not a rational square")
    u_e = np.array([x / CRoot3(QRoot3(root)) for x in B[:, 0]], dtype=object)
    # ad u on the translation space: the exact F
    adu_cols = []
    for i in range(1, n):
        basis_vec = np.empty(n, dtype=object)
        basis_vec[...] = CRoot3(0)
        basis_vec[i] = CRoot3(1)
        adu_cols.append(_exact_bracket(mla, u_e, basis_vec))
    for col in adu_cols:
        if not col[0].is_zero():
            raise NotARealForm("ad u does not preserve V exactly")
    Fe = np.empty((n - 1, n - 1), dtype=object)
    for j, col in enumerate(adu_cols):
        for i in range(n - 1):
            Fe[i, j] = col[1 + i]
    F3 = Fe @ Fe @ Fe
    cube = F3[0, 0]
    for i in range(n - 1):
        for j in range(n - 1):
            if F3[i, j] != (cube if i == j else CRoot3(0)):
                raise NotARealForm("recovered F does not cube to a scalar")
    if not (cube.im.is_zero() and cube.re.is_rational()):
        raise NotARealForm("recovered cube is irrational")
    p = fraction_cube_root(cube.re.a)
    if p is None:
        raise NotARealForm("recovered p^3 is not a rational cube")
    pC = CRoot3(QRoot3(p))
    omega = CRoot3.omega()
    return p, (pC, pC * omega, pC * omega.conj())


def _extract_exact_signs(ks: KillingStructure, X_basis: np.ndarray, mla: MetricLieAlgebra):
    """Exact delta = sgn gamma and the sign of <zeta, zeta> for the real root."""
    _exact_killing_frame(ks, mla)
    n = mla.dim
    ge = mla.gram_exact
    gamma = CRoot3(0)
    for i in range(n):
        for j in range(n):
            wi = ks.w_exact[i]
            wj = ks.w_exact[j]
            gamma = gamma + wi * CRoot3(ge[i, j]) * wj
    delta = gamma.re.sign()
    p, roots = _extract_exact(ks, X_basis, mla)
    # zeta: exact kernel of (F - p) on V, sign of its self inner product
    root = _rational_sqrt(abs(gamma.re.a))
    u_e = np.array([x / CRoot3(QRoot3(root)) for x in ks.w_exact], dtype=object)
    basis_cols = []
    for i in range(1, n):
        bv = np.empty(n, dtype=object)
        bv[...] = CRoot3(0)
        bv[i] = CRoot3(1)
        basis_cols.append(_exact_bracket(mla, u_e, bv))
    Fe = np.empty((n - 1, n - 1), dtype=object)
    for j, col in enumerate(basis_cols):
        for i in range(n - 1):
            Fe[i, j] = col[1 + i]
    pC = CRoot3(QRoot3(p))
    M = np.array(
        [
            [Fe[i, j] - (pC if i == j else CRoot3(0)) for j in range(n - 1)]
            for i in range(n - 1)
        ],
        dtype=object,
    )
    kern = exact_nullspace(M)
    if len(kern) != 1:
        raise NotARealForm("exact real eigenvector is not unique")
    zeta = kern[0]
    s0 = CRoot3(0)
    for i in range(n - 1):
        for j in range(n - 1):
            s0 = s0 + zeta[i] * CRoot3(ge[1 + i, 1 + j]) * zeta[j]
    if not s0.im.is_zero():
        raise NotARealForm("exact <zeta, zeta> is not real")
    return delta, s0.re.sign()


def _rational_sqrt(x: Fraction):
    x = Fraction(x)
    sn, sd = _isqrt(x.numerator), _isqrt(x.denominator)
    if sn is None or sd is None:
        return None
    return Fraction(sn, sd)
