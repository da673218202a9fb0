"""Eigenvalue-pattern recognition and the algebraic classification table.

An Einstein 4-metric with complex-diagonalizable curvature operator and
constant eigenvalues falls into one of a handful of local-isometry classes;
the decision is a pure function of the signature, the parallelism of the
self-dual Weyl morphism, and the eigenvalue pattern of its restriction.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import InconsistentEvidence, TraceNotZero
from .linalg import TOL, ComplexSpectrum, SignPattern

Q_CBRT = cmath.exp(2j * cmath.pi / 3)

PATTERNS = ("cube_root_triple", "multiple_eigenvalue", "all_equal", "other")

CASES = (
    "constant_curvature",
    "locally_symmetric_product",
    "petrov_ricci_flat_lorentz",
    "petrov_ricci_flat_neutral",
    "riemannian_locally_symmetric",
    "flat",
    "not_cdiagonalizable",
    "out_of_scope",
)


@dataclass(frozen=True)
class EigenPattern:
    """Shape of a trace-free 3-dimensional spectrum."""

    pattern: str
    lam: complex = 0.0

    def __post_init__(self):
        if self.pattern not in PATTERNS:
            raise ValueError(f"unknown pattern {self.pattern!r}")


def _pick_lambda(vals, tol_abs: float) -> complex:
    """Representative lambda of a cube-root triple.

    The set {lam, lam q, lam conj q} does not single out a member, so the
    real member is reported when one exists; otherwise the member with the
    largest real part (then largest imaginary part) is used.
    """
    real = [v for v in vals if abs(v.imag) <= tol_abs]
    if len(real) == 1:
        return complex(real[0])
    return complex(max(vals, key=lambda z: (round(z.real, 12), round(z.imag, 12))))


def eigen_pattern(spec: ComplexSpectrum, tol: float = TOL) -> EigenPattern:
    """Classify a trace-free 3-spectrum into the recognized shapes.

    cube_root_triple means {lam, lam e^{2pi i/3}, lam e^{4pi i/3}} with
    lam != 0, detected through vanishing first and second elementary
    symmetric functions with nonzero product.
    """
    vals = spec.values(with_multiplicity=True)
    if len(vals) != 3:
        raise TraceNotZero("expected a 3-dimensional spectrum")
    scale = max(1.0, max(abs(v) for v in vals))
    e1 = sum(vals)
    if abs(e1) > 1e3 * tol * scale:
        raise TraceNotZero(f"spectrum sums to {e1}, not zero")
    e2 = vals[0] * vals[1] + vals[0] * vals[2] + vals[1] * vals[2]
    e3 = vals[0] * vals[1] * vals[2]
    tol_abs = 1e3 * tol * scale
    spread = max(abs(a - b) for a in vals for b in vals)
    if spread <= tol_abs:
        return EigenPattern("all_equal", complex(np.mean(vals)))
    if abs(e2) <= 1e3 * tol * scale**2 and abs(e3) > tol * scale**3:
        return EigenPattern("cube_root_triple", _pick_lambda(vals, tol_abs))
    if min(abs(a - b) for i, a in enumerate(vals) for b in vals[i + 1 :]) <= tol_abs:
        return EigenPattern("multiple_eigenvalue", _pick_lambda(vals, tol_abs))
    return EigenPattern("other")


@dataclass(frozen=True)
class ClassificationResult:
    """Decision-table output with its evidence rows."""

    case: str
    evidence: tuple  # of (name, value) pairs

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(f"unknown case {self.case!r}")


def classify(
    signature: SignPattern,
    einstein: bool,
    cdiag: bool,
    parallel_W: bool,
    pattern: EigenPattern,
    ricci_flat: bool,
) -> ClassificationResult:
    """Decision table over the algebraic invariants of an oriented 4-model.

    Raises InconsistentEvidence for combinations that cannot occur for
    genuine inputs (they signal numerical trouble upstream).
    """
    evidence = (
        ("signature", str(signature)),
        ("einstein", einstein),
        ("cdiag", cdiag),
        ("parallel_weyl", parallel_W),
        ("eigen_pattern", pattern.pattern),
        ("ricci_flat", ricci_flat),
    )

    def result(case):
        return ClassificationResult(case, evidence)

    if not einstein:
        return result("out_of_scope")
    if not cdiag:
        return result("not_cdiagonalizable")
    if not parallel_W and pattern.pattern == "all_equal":
        raise InconsistentEvidence(
            "all eigenvalues equal forces a parallel Weyl morphism"
        )
    if parallel_W and pattern.pattern == "all_equal" and ricci_flat:
        return result("flat")
    if signature.is_riemannian():
        return result("riemannian_locally_symmetric")
    if signature.is_lorentzian():
        if parallel_W:
            if pattern.pattern == "all_equal":
                return result("constant_curvature")
            if pattern.pattern == "multiple_eigenvalue":
                return result("locally_symmetric_product")
            raise InconsistentEvidence(
                "parallel Weyl with distinct eigenvalues cannot occur"
            )
        if pattern.pattern == "cube_root_triple" and ricci_flat:
            return result("petrov_ricci_flat_lorentz")
        raise InconsistentEvidence(
            "non-parallel Lorentzian case requires a Ricci-flat cube-root triple"
        )
    if signature.is_neutral():
        if parallel_W:
            return result("out_of_scope")
        if pattern.pattern == "cube_root_triple" and ricci_flat:
            return result("petrov_ricci_flat_neutral")
        raise InconsistentEvidence(
            "non-parallel neutral case requires a Ricci-flat cube-root triple"
        )
    return result("out_of_scope")


def weyl_trace_identities(l1: complex, l2: complex, l3: complex, s: float) -> float:
    """Deviation in the two trace identities of a Weyl-like spectrum.

    The first is l1 + l2 + l3 = 0; the second, sum of
    L_j = (l_k - l_l)(l_j + s/12) over cyclic triples, vanishes identically
    whenever the first does.
    """
    lam = (l1, l2, l3)
    e1 = abs(sum(lam))
    total = 0.0 + 0.0j
    for (j, k, l) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        total += (lam[k] - lam[l]) * (lam[j] + s / 12.0)
    return max(e1, abs(total))
