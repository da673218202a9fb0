"""Small dense real/complex linear algebra with a fixed comparison tolerance.

Everything here is for matrices of size at most 6: bilinear forms and their
inertia, self-adjointness relative to an indefinite form, complex spectra
with algebraic/geometric multiplicities, and complex diagonalizability.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateForm, DimensionMismatch

TOL = 1e-9

MAX_DIM = 6


def _maxabs(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


@dataclass(frozen=True)
class SignPattern:
    """Ordered inertia signs of a nondegenerate symmetric form, minus first."""

    signs: tuple

    def __post_init__(self):
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +-1")

    def __str__(self):
        return "".join("-" if s < 0 else "+" for s in self.signs)

    @property
    def n_minus(self) -> int:
        return sum(1 for s in self.signs if s < 0)

    def is_riemannian(self) -> bool:
        return self.n_minus == 0

    def is_lorentzian(self) -> bool:
        return len(self.signs) == 4 and self.n_minus == 1

    def is_neutral(self) -> bool:
        return len(self.signs) == 4 and self.n_minus == 2


@dataclass(frozen=True)
class SymBilinearForm:
    """A nondegenerate symmetric bilinear form given by its Gram matrix."""

    gram: np.ndarray
    tol: float = TOL
    signature: SignPattern = field(init=False)

    def __post_init__(self):
        gram = np.asarray(self.gram, dtype=float)
        if gram.ndim != 2 or gram.shape[0] != gram.shape[1]:
            raise DimensionMismatch("Gram matrix must be square")
        if gram.shape[0] > MAX_DIM:
            raise DimensionMismatch("dimension above 6 not supported")
        if _maxabs(gram - gram.T) > self.tol * (1.0 + _maxabs(gram)):
            raise DegenerateForm("Gram matrix is not symmetric")
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "signature", signature_of_gram(gram, self.tol))

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def inner(self, v, w) -> float:
        return float(np.asarray(v) @ self.gram @ np.asarray(w))


def signature_of_gram(gram: np.ndarray, tol: float = TOL) -> SignPattern:
    """Inertia signs of a symmetric matrix, sorted minus-first.

    Raises DegenerateForm when some eigenvalue is at the degeneracy threshold.
    """
    gram = np.asarray(gram, dtype=float)
    w = np.linalg.eigvalsh(0.5 * (gram + gram.T))
    scale = max(1.0, _maxabs(gram))
    if np.min(np.abs(w)) <= tol * scale:
        raise DegenerateForm("form is degenerate to tolerance")
    signs = sorted((1 if x > 0 else -1) for x in w)
    return SignPattern(tuple(signs))


def signature_of(form: SymBilinearForm) -> SignPattern:
    """Inertia signs of a nondegenerate form, minus-first."""
    return form.signature


def is_self_adjoint(F, form: SymBilinearForm, tol: float | None = None) -> bool:
    """True iff <Fv, v'> = <v, Fv'> for all basis pairs, to tolerance.

    In Gram terms: G F must be symmetric.
    """
    F = np.asarray(F, dtype=float)
    if F.shape != (form.dim, form.dim):
        raise DimensionMismatch("operator and form dimensions differ")
    tol = form.tol if tol is None else tol
    gf = form.gram @ F
    scale = 1.0 + _maxabs(gf)
    return _maxabs(gf - gf.T) <= tol * scale


def matrix_rank(m, tol: float = TOL) -> int:
    """Rank by row reduction with pivot threshold tol * (max-abs of input)."""
    a = np.array(m, dtype=complex, copy=True)
    if a.size == 0:
        return 0
    thresh = tol * max(1.0, _maxabs(a))
    rows, cols = a.shape
    rank = 0
    row = 0
    for col in range(cols):
        if row >= rows:
            break
        piv = row + int(np.argmax(np.abs(a[row:, col])))
        if abs(a[piv, col]) <= thresh:
            continue
        a[[row, piv]] = a[[piv, row]]
        a[row] = a[row] / a[row, col]
        for r in range(rows):
            if r != row:
                a[r] = a[r] - a[r, col] * a[row]
        rank += 1
        row += 1
    return rank


@dataclass(frozen=True)
class ComplexSpectrum:
    """Eigenvalues with algebraic and geometric multiplicities."""

    eigenvalues: tuple  # of (value, algebraic, geometric)
    diagonalizable: bool

    @property
    def dim(self) -> int:
        return sum(a for _, a, _ in self.eigenvalues)

    def values(self, with_multiplicity: bool = True) -> list:
        out = []
        for v, a, _ in self.eigenvalues:
            out.extend([v] * (a if with_multiplicity else 1))
        return out


def _sort_key(v: complex):
    # |mu| descending, argument ascending; rounding makes ties deterministic.
    return (-round(abs(v), 12), round(float(np.angle(v)), 12))


def _rank_with_threshold(m: np.ndarray, thresh: float) -> int:
    s = np.linalg.svd(np.asarray(m, dtype=complex), compute_uv=False)
    return int(np.sum(s > thresh))


def complex_spectrum(M, tol: float = TOL) -> ComplexSpectrum:
    """Spectrum of a square complex matrix with multiplicities.

    Defective eigenvalues scatter by roughly eps^(1/k) under rounding, so
    diagonalizability is decided from the conditioning of the eigenvector
    matrix, and the clustering radius is widened for ill-conditioned inputs.
    Geometric multiplicity of a cluster value mu is dim - rank(M - mu I),
    with the rank threshold matched to the cluster radius.  Eigenvalues
    closer than the clustering radius are treated as equal.
    """
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    if M.shape != (n, n) or n > MAX_DIM:
        raise DimensionMismatch("square matrix of dimension <= 6 required")
    vals, vecs = np.linalg.eig(M)
    norms = np.linalg.norm(vecs, axis=0)
    vec_cond = np.linalg.svd(vecs / norms, compute_uv=False)[-1]
    well_conditioned = vec_cond > 1e3 * tol
    scale = max(1.0, _maxabs(M))
    eps_n = float(np.finfo(float).eps) ** (1.0 / n)
    thresh = scale * max(1e3 * tol, 0.0 if well_conditioned else 10.0 * eps_n)
    clusters: list[list[complex]] = []
    for v in sorted(vals, key=_sort_key):
        for c in clusters:
            if abs(v - c[0]) <= thresh:
                c.append(v)
                break
        else:
            clusters.append([v])
    entries = []
    all_semisimple = True
    for c in clusters:
        mu = complex(np.mean(c))
        alg = len(c)
        radius = max((abs(v - mu) for v in c), default=0.0)
        rank_thresh = max(tol * scale, 3.0 * radius)
        geo = n - _rank_with_threshold(M - mu * np.eye(n), rank_thresh)
        geo = max(1, min(geo, alg))
        all_semisimple = all_semisimple and geo == alg
        entries.append((mu, alg, geo))
    entries.sort(key=lambda e: _sort_key(e[0]))
    return ComplexSpectrum(tuple(entries), bool(well_conditioned and all_semisimple))


def is_complex_diagonalizable(B, tol: float = TOL) -> bool:
    """True iff the complex-linear extension of the real matrix B is diagonalizable."""
    return complex_spectrum(np.asarray(B, dtype=complex), tol).diagonalizable
