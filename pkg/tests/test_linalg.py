"""Dense small-matrix layer: signatures, adjoints, spectra, diagonalizability."""

from fractions import Fraction

import numpy as np
import pytest

from curvhom4.errors import DegenerateForm, DimensionMismatch
from curvhom4.linalg import (
    SymBilinearForm,
    complex_spectrum,
    is_complex_diagonalizable,
    is_self_adjoint,
    signature_of,
)
from curvhom4.models import diagonalizable_F, standard_inner_product


def test_signature_identity_form():
    form = SymBilinearForm(np.eye(4))
    assert str(signature_of(form)) == "++++"


def test_signature_hyperbolic_pair():
    form = SymBilinearForm(np.array([[0.0, 1, 0], [1, 0, 0], [0, 0, 1]]))
    assert str(signature_of(form)) == "-++"


def test_signature_neutral():
    form = SymBilinearForm(np.diag([-1.0, -1, 1, 1]))
    assert str(signature_of(form)) == "--++"


def test_degenerate_form_rejected():
    with pytest.raises(DegenerateForm):
        SymBilinearForm(np.diag([1.0, 0.0, 1]))


def test_signature_congruence_invariant():
    rng = np.random.default_rng(3)
    for dim in (3, 4):
        grams = [np.diag([1.0] * dim), np.diag([-1.0] + [1.0] * (dim - 1))]
        for g in grams:
            sig = str(signature_of(SymBilinearForm(g)))
            for _ in range(25):
                while True:
                    S = rng.integers(-3, 4, (dim, dim)).astype(float)
                    if abs(np.linalg.det(S)) > 0.5:
                        break
                assert str(signature_of(SymBilinearForm(S.T @ g @ S))) == sig


def test_self_adjoint_examples():
    form = SymBilinearForm(np.eye(2))
    assert is_self_adjoint(np.eye(2), form)
    assert not is_self_adjoint(np.array([[0.0, 1], [0, 0]]), form)
    fam_form = SymBilinearForm(standard_inner_product(1))
    assert is_self_adjoint(diagonalizable_F(1.0), fam_form)


def test_self_adjoint_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        is_self_adjoint(np.eye(3), SymBilinearForm(np.eye(2)))


def test_spectrum_cube_root_triple():
    q = np.exp(2j * np.pi / 3)
    spec = complex_spectrum(np.diag([1.0, q, np.conj(q)]))
    assert spec.diagonalizable
    assert all(a == 1 and g == 1 for _, a, g in spec.eigenvalues)


def test_spectrum_zero_matrix():
    spec = complex_spectrum(np.zeros((3, 3)))
    assert spec.eigenvalues == ((0j, 3, 3),)
    assert spec.diagonalizable


def test_spectrum_sorted_by_modulus_then_argument():
    spec = complex_spectrum(np.diag([1.0, -2.0, 1j]))
    vals = spec.values()
    assert vals[0] == pytest.approx(-2.0)
    assert abs(vals[1]) == pytest.approx(1.0)


def test_jordan_block_not_diagonalizable():
    assert not is_complex_diagonalizable(np.array([[1.0, 1], [0, 1]]))
    assert not is_complex_diagonalizable(np.diag(np.ones(5), 1))


def test_rotation_is_cdiag_symmetric_is_cdiag():
    th = 2 * np.pi / 3
    rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    assert is_complex_diagonalizable(rot)
    rng = np.random.default_rng(5)
    for _ in range(10):
        s = rng.uniform(-1, 1, (4, 4))
        assert is_complex_diagonalizable(s + s.T)


def _charpoly_fractions(M):
    """Faddeev-LeVerrier characteristic polynomial over exact rationals."""
    n = M.shape[0]
    A = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            A[i, j] = Fraction(int(M[i, j]))
    eye = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            eye[i, j] = Fraction(1 if i == j else 0)
    coeffs = [Fraction(1)]
    Mk = np.array(eye)
    for k in range(1, n + 1):
        Mk = A @ Mk
        c = -sum(Mk[i, i] for i in range(n)) / k
        coeffs.append(c)
        for i in range(n):
            Mk[i, i] += c
    return coeffs  # x^n + c1 x^{n-1} + ... + cn


def _poly_gcd_degree(p):
    """Degree of gcd(p, p') over Q, by exact Euclid.

    Polynomials are coefficient lists, highest degree first.
    """

    def trim(a):
        i = 0
        while i < len(a) - 1 and a[i] == 0:
            i += 1
        return a[i:]

    def is_zero(a):
        return len(a) == 1 and a[0] == 0

    def mod(a, b):
        a = trim(list(a))
        while not is_zero(a) and len(a) >= len(b):
            f = a[0] / b[0]
            for i in range(len(b)):
                a[i] -= f * b[i]
            a = trim(a)
        return a

    dp = [c * (len(p) - 1 - i) for i, c in enumerate(p[:-1])]
    a, b = trim(list(p)), trim(dp)
    while not is_zero(b):
        a, b = b, mod(a, b)
    return len(a) - 1


def _poly_divmod(a, b):
    a = list(a)
    q = []
    while len(a) >= len(b):
        f = a[0] / b[0]
        q.append(f)
        for i in range(len(b)):
            a[i] -= f * b[i]
        a.pop(0)
    return q, a


def _poly_gcd(p, q):
    def trim(a):
        i = 0
        while i < len(a) - 1 and a[i] == 0:
            i += 1
        return a[i:]

    a, b = trim(list(p)), trim(list(q))
    while not (len(b) == 1 and b[0] == 0):
        _, r = _poly_divmod(a, b)
        a, b = b, trim(r) if r else [Fraction(0)]
    return a


def _minimal_poly_squarefree(M) -> bool:
    """Exact oracle: diagonalizable iff the squarefree part of the
    characteristic polynomial annihilates the matrix.

    The minimal polynomial is squarefree exactly when rad(chi) = chi/gcd(chi,
    chi') evaluates to zero at the matrix; checking only deg gcd(chi, chi')
    = 0 would misclassify semisimple repeated eigenvalues.
    """
    chi = _charpoly_fractions(M)
    dchi = [c * (len(chi) - 1 - i) for i, c in enumerate(chi[:-1])]
    g = _poly_gcd(chi, dchi)
    rad, rem = _poly_divmod(chi, g)
    assert all(c == 0 for c in rem)
    n = M.shape[0]
    A = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            A[i, j] = Fraction(int(M[i, j]))
    acc = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            acc[i, j] = rad[0] if i == j else Fraction(0)
    for c in rad[1:]:
        acc = acc @ A
        for i in range(n):
            acc[i, i] += c
    return all(acc[i, j] == 0 for i in range(n) for j in range(n))


def test_cdiag_agrees_with_minimal_polynomial_oracle():
    rng = np.random.default_rng(11)
    cases = []
    for dim in (3, 6):
        for _ in range(80):
            cases.append(rng.integers(-3, 4, (dim, dim)))
    # mix in defective and semisimple structured cases, conjugated by
    # unimodular integer matrices so that exactness is preserved
    J = np.zeros((3, 3), dtype=int)
    J[0, 1] = 1
    cases.append(J)
    U = np.array([[1, 2, 0], [0, 1, 1], [0, 0, 1]])
    Uinv = np.array([[1, -2, 2], [0, 1, -1], [0, 0, 1]])
    cases.append(U @ J @ Uinv)
    cases.append(U @ np.diag([1, 1, 2]) @ Uinv)
    big = np.zeros((6, 6), dtype=int)
    big[:3, :3] = U @ J @ Uinv
    big[3:, 3:] = np.diag([2, 3, 4])
    cases.append(big)
    for M in cases:
        got = is_complex_diagonalizable(M.astype(float))
        want = _minimal_poly_squarefree(M)
        assert got == want, f"disagreement on\n{M}"


def test_spectrum_similarity_invariance():
    rng = np.random.default_rng(13)
    for dim in (3, 6):
        for _ in range(10):
            M = rng.uniform(-1, 1, (dim, dim))
            while True:
                S = rng.uniform(-1, 1, (dim, dim))
                if np.linalg.cond(S) < 20:
                    break
            a = complex_spectrum(M).values()
            b = list(complex_spectrum(np.linalg.solve(S, M @ S)).values())
            # greedy multiset matching; plain sorting is unstable for
            # conjugate pairs whose real parts agree only to rounding
            for x in a:
                j = min(range(len(b)), key=lambda i: abs(b[i] - x))
                assert abs(b[j] - x) < 1e-9 * max(1.0, abs(x))
                b.pop(j)
