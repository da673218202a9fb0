"""Bivector calculus for oriented metric Lie algebras in dimension four.

The six-dimensional bivector space carries the induced metric
<v^u, v'^u'> = g(v,v') g(u,u') - g(v,u') g(u,v'), the Hodge star, and the
curvature operator <R(u^v), w^w'> = g(R(u,v)w, w').  Bivectors are also
endomorphisms via (v^u) w = <v,w> u - <u,w> v; both pictures are used.

Basis order is fixed: (u^e1, u^e2, u^e3, e2^e3, e3^e1, e1^e2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curvature import CurvatureTensor, gen_maxabs
from .errors import (
    NotStarCommuting,
    NullVector,
    OrthonormalizationFailure,
    WrongDimension,
)
from .linalg import TOL, signature_of_gram
from .models import MetricLieAlgebra

PAIRS = ((0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2))


def perm_sign(seq) -> int:
    """Sign of a permutation of 0..n-1, or 0 if entries repeat."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def induced_gram6(g4: np.ndarray) -> np.ndarray:
    g6 = np.zeros((6, 6))
    for I, (a, b) in enumerate(PAIRS):
        for J, (c, d) in enumerate(PAIRS):
            g6[I, J] = g4[a, c] * g4[b, d] - g4[a, d] * g4[b, c]
    return g6


def wedge_components(v, u) -> np.ndarray:
    """Components of v ^ u in the fixed bivector basis."""
    v = np.asarray(v)
    u = np.asarray(u)
    return np.array([v[i] * u[j] - v[j] * u[i] for (i, j) in PAIRS])


def pair_endo(i: int, j: int, g4: np.ndarray) -> np.ndarray:
    """Endomorphism of X_i ^ X_j: w -> g(X_i,w) X_j - g(X_j,w) X_i."""
    E = np.zeros((4, 4))
    E[j, :] += g4[i, :]
    E[i, :] -= g4[j, :]
    return E


def wedge4_coefficient(I: int, J: int) -> int:
    """(B_I ^ B_J) = coeff * X_0^X_1^X_2^X_3."""
    (a, b), (c, d) = PAIRS[I], PAIRS[J]
    return perm_sign((a, b, c, d))


@dataclass(frozen=True)
class BivectorSpace:
    """Bivector basis data over a 4-dimensional metric Lie algebra."""

    mla: MetricLieAlgebra
    orientation: int
    gram6: np.ndarray
    endos: tuple  # endomorphism matrices of the 6 basis bivectors
    on_basis: np.ndarray  # columns: pseudo-orthonormal frame in model coords
    on_eps: tuple
    vol_coeff: float  # vol = vol_coeff * X_0^X_1^X_2^X_3

    @property
    def g4(self) -> np.ndarray:
        return self.mla.gram

    def to_endo(self, comps) -> np.ndarray:
        comps = np.asarray(comps)
        out = np.zeros((4, 4), dtype=comps.dtype)
        for I in range(6):
            out = out + comps[I] * self.endos[I]
        return out

    def from_endo(self, endo, tol: float = TOL) -> np.ndarray:
        """Components of a (skew-adjoint) endomorphism in the bivector basis."""
        M = np.column_stack([e.reshape(-1) for e in self.endos]).astype(complex)
        rhs = np.asarray(endo, dtype=complex).reshape(-1)
        comps, *_ = np.linalg.lstsq(M, rhs, rcond=None)
        resid = gen_maxabs(M @ comps - rhs)
        if resid > tol * (1.0 + gen_maxabs(rhs)):
            raise WrongDimension("endomorphism is not a bivector")
        if gen_maxabs(comps.imag) == 0.0:
            return comps.real
        return comps

    def inner6(self, x, y):
        """Complex-bilinear extension of the bivector metric."""
        return np.asarray(x) @ self.gram6 @ np.asarray(y)


def _orthonormalize(g4: np.ndarray, tol: float) -> tuple:
    """Indefinite Gram-Schmidt with largest-|norm| pivoting.

    If every remaining candidate is null, a sum of two candidates with a
    nonzero pairing is used; nondegeneracy guarantees one exists.
    """
    n = g4.shape[0]
    cands = [np.eye(n)[:, i] for i in range(n)]
    basis = []
    eps = []
    scale = max(1.0, float(np.max(np.abs(g4))))
    for _ in range(n):
        resid = []
        for c in cands:
            r = c.copy()
            for f, e in zip(basis, eps):
                r = r - e * (f @ g4 @ r) * f
            resid.append(r)
        norms = [float(r @ g4 @ r) for r in resid]
        best = int(np.argmax(np.abs(norms)))
        if abs(norms[best]) <= tol * scale:
            found = None
            for i in range(len(resid)):
                for j in range(i + 1, len(resid)):
                    if abs(resid[i] @ g4 @ resid[j]) > tol * scale:
                        found = resid[i] + resid[j]
                        best = i
                        break
                if found is not None:
                    break
            if found is None:
                raise OrthonormalizationFailure("no non-null combination found")
            r = found
        else:
            r = resid[best]
        nr = float(r @ g4 @ r)
        f = r / np.sqrt(abs(nr))
        basis.append(f)
        eps.append(1 if nr > 0 else -1)
        cands.pop(best)
    C = np.column_stack(basis)
    return C, tuple(eps)


def bivector_space(mla: MetricLieAlgebra, orientation: int = 1, tol: float = TOL) -> BivectorSpace:
    """Induced bivector metric, endomorphism basis, and oriented volume data."""
    if mla.dim != 4:
        raise WrongDimension("bivector calculus requires dimension 4")
    if orientation not in (1, -1):
        raise ValueError("orientation must be +-1")
    g4 = mla.gram
    gram6 = induced_gram6(g4)
    endos = tuple(pair_endo(i, j, g4) for (i, j) in PAIRS)
    C, eps = _orthonormalize(g4, tol)
    if float(np.linalg.det(C)) * orientation < 0:
        C = C.copy()
        C[:, -1] = -C[:, -1]
    vol_coeff = float(np.linalg.det(C))
    return BivectorSpace(mla, orientation, gram6, endos, C, eps, vol_coeff)


@dataclass(frozen=True)
class HodgeStar:
    """The star operator on the fixed bivector basis; star^2 = square_sign Id."""

    matrix: np.ndarray
    square_sign: int


def hodge_star(space: BivectorSpace, tol: float = TOL) -> HodgeStar:
    """Assemble star from a positively oriented orthonormal frame.

    *(f_a ^ f_b) = sign(a,b,c,d) eps_c eps_d f_c ^ f_d for the complementary
    pair, conjugated back to the model bivector basis.
    """
    C, eps = space.on_basis, space.on_eps
    star_on = np.zeros((6, 6))
    for I, (a, b) in enumerate(PAIRS):
        rest = [x for x in range(4) if x not in (a, b)]
        J = next(K for K, pr in enumerate(PAIRS) if set(pr) == set(rest))
        c, d = PAIRS[J]
        star_on[J, I] = perm_sign((a, b, c, d)) * eps[c] * eps[d]
    T = np.column_stack(
        [wedge_components(C[:, a], C[:, b]) for (a, b) in PAIRS]
    )
    star = T @ star_on @ np.linalg.inv(T)
    pattern = signature_of_gram(space.g4, tol)
    square_sign = 1 if pattern.n_minus % 2 == 0 else -1
    dev = gen_maxabs(star @ star - square_sign * np.eye(6))
    if dev > 100 * tol:
        raise OrthonormalizationFailure(f"star square defect {dev}")
    return HodgeStar(star, square_sign)


def star_duality_defect(space: BivectorSpace, star: HodgeStar) -> float:
    """Max deviation of alpha ^ beta = <*alpha, beta> vol over basis pairs."""
    worst = 0.0
    for I in range(6):
        for J in range(6):
            lhs = wedge4_coefficient(I, J)
            rhs = float((space.gram6 @ star.matrix)[J, I]) * space.vol_coeff
            worst = max(worst, abs(lhs - rhs))
    return worst


def curvature_operator(R: CurvatureTensor, space: BivectorSpace) -> np.ndarray:
    """Matrix of the curvature operator on the bivector basis.

    <R(B_I), B_J> = R_{abcd}; the operator solves against the induced Gram.
    """
    Q = np.zeros((6, 6))
    for I, (a, b) in enumerate(PAIRS):
        for J, (c, d) in enumerate(PAIRS):
            Q[I, J] = R.Rdown[a, b, c, d]
    return np.linalg.solve(space.gram6, Q)


def self_adjoint_defect6(op: np.ndarray, space: BivectorSpace) -> float:
    m = space.gram6 @ op
    return gen_maxabs(m - m.T)


def kulkarni_nomizu(h: np.ndarray, k: np.ndarray) -> np.ndarray:
    """(h ^ k)_{abcd} = h_ac k_bd + h_bd k_ac - h_ad k_bc - h_bc k_ad.

    Normalized so that (g ^ g)/2 acts as the identity on bivectors.
    """
    n = h.shape[0]
    out = np.zeros((n,) * 4)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    out[a, b, c, d] = (
                        h[a, c] * k[b, d]
                        + h[b, d] * k[a, c]
                        - h[a, d] * k[b, c]
                        - h[b, c] * k[a, d]
                    )
    return out


@dataclass(frozen=True)
class WeylDecomposition:
    """Schouten tensor, Weyl tensor/operator, and the Einstein witness."""

    sigma: np.ndarray
    weyl_tensor: CurvatureTensor
    weyl_op: np.ndarray
    einstein_witness: float  # max-abs of R - W - (s/12) Id on bivectors


def schouten_weyl(
    R: CurvatureTensor,
    ricci: np.ndarray,
    scalar: float,
    mla: MetricLieAlgebra,
    space: BivectorSpace,
) -> WeylDecomposition:
    """sigma = Ric - s g / (2n-2); W = R - (g ^ sigma)/(n - 2)."""
    n = mla.dim
    if n != 4:
        raise WrongDimension("Weyl decomposition implemented for n = 4")
    g = mla.gram
    sigma = ricci - (scalar / (2 * n - 2)) * g
    W_down = R.Rdown - kulkarni_nomizu(g, sigma) / (n - 2)
    W = CurvatureTensor(W_down)
    W_op = curvature_operator(W, space)
    R_op = curvature_operator(R, space)
    witness = gen_maxabs(R_op - W_op - (scalar / 12.0) * np.eye(6))
    return WeylDecomposition(sigma, W, W_op, witness)


def weyl_trace_defect(weyl_op: np.ndarray) -> float:
    return abs(float(np.trace(weyl_op)))


def commutator_with_star(op: np.ndarray, star: HodgeStar) -> float:
    """Max-abs entry of op . star - star . op."""
    op = np.asarray(op)
    return gen_maxabs(op @ star.matrix - star.matrix @ op)


def _nullspace(m: np.ndarray, tol: float) -> np.ndarray:
    u, s, vt = np.linalg.svd(m)
    scale = max(1.0, float(s[0]) if s.size else 1.0)
    keep = s <= tol * scale
    # svd lists singular values in descending order; kernel = trailing rows of vt
    k = int(np.sum(keep))
    if k == 0:
        return np.zeros((m.shape[1], 0))
    return vt[-k:].conj().T


@dataclass(frozen=True)
class SelfDualSplit:
    """Eigenbundles of star (star^2 = Id) or the complex structure (star^2 = -Id)."""

    kind: str  # "real_split" | "complex_structure"
    plus_basis: np.ndarray | None = None  # 6 x 3
    minus_basis: np.ndarray | None = None
    J: np.ndarray | None = None


def selfdual_split(star: HodgeStar, space: BivectorSpace, tol: float = TOL) -> SelfDualSplit:
    if star.square_sign == -1:
        return SelfDualSplit("complex_structure", J=star.matrix)
    plus = _nullspace(star.matrix - np.eye(6), tol)
    minus = _nullspace(star.matrix + np.eye(6), tol)
    if plus.shape[1] != 3 or minus.shape[1] != 3:
        raise OrthonormalizationFailure("self-dual split has wrong dimensions")
    return SelfDualSplit("real_split", plus_basis=plus.real, minus_basis=minus.real)


@dataclass(frozen=True)
class ComplexE:
    """The rank-3 complex bundle fibre: either the complexified self-dual
    space, or the (+i)-eigenspace of star inside complexified bivectors."""

    kind: str  # "complexified_selfdual" | "lorentz_eigenspace"
    basis: np.ndarray  # 6 x 3 complex, columns spanning E
    h: np.ndarray  # 3 x 3 complex-bilinear Gram
    w_plus: np.ndarray  # 3 x 3 matrix of the Weyl morphism on E
    space: BivectorSpace
    star: HodgeStar


def restrict_to_E(op: np.ndarray, basis: np.ndarray, star: HodgeStar, tol: float = TOL) -> np.ndarray:
    """3x3 matrix of a star-commuting operator restricted to span(basis)."""
    comm = commutator_with_star(op, star)
    scale = 1.0 + gen_maxabs(op)
    if comm > 1e4 * tol * scale:
        raise NotStarCommuting(f"[op, star] max-abs = {comm}")
    opc = np.asarray(op, dtype=complex)
    rhs = opc @ basis
    M, *_ = np.linalg.lstsq(basis, rhs, rcond=None)
    resid = gen_maxabs(basis @ M - rhs)
    if resid > 1e4 * tol * scale:
        raise NotStarCommuting(f"operator does not preserve E: residual {resid}")
    return M


def build_E(
    space: BivectorSpace,
    star: HodgeStar,
    split: SelfDualSplit,
    weyl_op: np.ndarray,
    tol: float = TOL,
) -> ComplexE:
    """E and its complex-bilinear fibre metric h, with the Weyl morphism.

    Riemannian/neutral: E = complexified self-dual space.  Lorentzian: E is
    the (+i)-eigenspace of star, spanned by alpha - i (star alpha).
    """
    if split.kind == "real_split":
        basis = split.plus_basis.astype(complex)
        kind = "complexified_selfdual"
    else:
        cols = []
        span = np.zeros((6, 0))
        for I in range(6):
            cand = np.eye(6)[:, I]
            trial = np.column_stack([span, cand, star.matrix @ cand])
            if np.linalg.matrix_rank(trial, tol=1e-8) == span.shape[1] + 2:
                cols.append(cand)
                span = trial
            if len(cols) == 3:
                break
        if len(cols) != 3:
            raise NullVector("could not find a complex basis of bivectors")
        basis = np.column_stack(
            [c.astype(complex) - 1j * (star.matrix @ c) for c in cols]
        )
        kind = "lorentz_eigenspace"
    h = basis.T @ space.gram6.astype(complex) @ basis
    if abs(np.linalg.det(h)) <= tol:
        raise OrthonormalizationFailure("fibre metric h is degenerate")
    w_plus = restrict_to_E(weyl_op, basis, star, tol)
    return ComplexE(kind, basis, h, w_plus, space, star)


def project_H_iso(space: BivectorSpace, star: HodgeStar, weyl_op: np.ndarray, tol: float = TOL) -> dict:
    """The span H of u ^ (u-perp) versus the self-dual world.

    Real/neutral: the orthogonal projection onto the self-dual space is an
    isomorphism on H carrying W|_H to W+.  Lorentzian: H spans the bivectors
    over C and W is the complex-linear extension of W|_H.
    """
    g4 = space.g4
    if abs(g4[0, 0]) <= tol:
        raise NullVector("frame vector u is null")
    # H = span(u ^ e_1, u ^ e_2, u ^ e_3): the first three basis bivectors.
    H = np.eye(6)[:, :3]
    WH = weyl_op[:3, :3]
    invariance = gen_maxabs(weyl_op[3:, :3])
    out = {"w_invariance_defect": float(invariance)}
    if star.square_sign == 1:
        plus = _nullspace(star.matrix - np.eye(6), tol).real
        # <,>-orthogonal projection onto the self-dual space along the
        # anti-self-dual one is (Id + star)/2.
        P = 0.5 * (np.eye(6) + star.matrix)
        PH = np.linalg.lstsq(plus, P @ H, rcond=None)[0]  # 3x3 in plus-basis
        Wp = np.linalg.lstsq(plus, (weyl_op @ plus), rcond=None)[0]
        conj_defect = gen_maxabs(PH @ WH - Wp @ PH)
        out.update(
            {
                "kind": "projection",
                "matrix": PH,
                "invertible": bool(abs(np.linalg.det(PH)) > tol),
                "conjugation_defect": float(conj_defect),
            }
        )
    else:
        full = np.column_stack([H, star.matrix @ H])
        rank = np.linalg.matrix_rank(full, tol=1e-8)
        # complex matrix of W restricted to H in the J = star structure
        WHfull = weyl_op @ H
        coeffs = np.linalg.lstsq(full, WHfull, rcond=None)[0]
        Wc = coeffs[:3] + 1j * coeffs[3:]
        # reconstruct the real action from the complex matrix and compare
        recon = H @ Wc.real + (star.matrix @ H) @ Wc.imag
        ext_defect = gen_maxabs(recon - WHfull)
        out.update(
            {
                "kind": "complex_span",
                "complex_rank": int(rank // 2),
                "matrix": Wc,
                "extension_defect": float(ext_defect),
            }
        )
    return out


# ---------------------------------------------------------------------------
# Identity battery for the endomorphism picture of bivectors.
# ---------------------------------------------------------------------------


def bivector_identity_battery(space: BivectorSpace, rng: np.random.Generator, trials: int = 20) -> dict:
    """Random checks of the endomorphism identities.

    (v^u)w = <v,w>u - <u,w>v;  <a,a'> = -Trace(a a')/2 matches the Gram;
    a (v^u) = v (x) (a u) - u (x) (a v);  Trace[a (v^u)] = -2 g(a v, u).
    """
    g4 = space.g4
    dev_action = dev_trace_inner = dev_compose = dev_trace_pair = 0.0
    for _ in range(trials):
        v, u, w = (rng.uniform(-1, 1, 4) for _ in range(3))
        a = rng.uniform(-1, 1, 6)
        b = rng.uniform(-1, 1, 6)
        vu = space.to_endo(wedge_components(v, u))
        lhs = vu @ w
        rhs = (v @ g4 @ w) * u - (u @ g4 @ w) * v
        dev_action = max(dev_action, gen_maxabs(lhs - rhs))
        ea = space.to_endo(a)
        eb = space.to_endo(b)
        gram_based = a @ space.gram6 @ b
        trace_based = -np.trace(ea @ eb) / 2.0
        dev_trace_inner = max(dev_trace_inner, abs(gram_based - trace_based))
        # (x (x) y) acts by w -> <x, w> y, i.e. the matrix y (g4 x)^T
        composed = ea @ vu
        tensor_form = np.outer(ea @ u, g4 @ v) - np.outer(ea @ v, g4 @ u)
        dev_compose = max(dev_compose, gen_maxabs(composed - tensor_form))
        tr = np.trace(composed)
        dev_trace_pair = max(dev_trace_pair, abs(tr + 2.0 * (ea @ v) @ g4 @ u))
    return {
        "wedge_action": dev_action,
        "trace_inner_product": dev_trace_inner,
        "composition_tensor_form": dev_compose,
        "trace_pairing": dev_trace_pair,
    }
