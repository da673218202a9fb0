"""Model families, the metric Lie algebra, and the chart realization."""

from fractions import Fraction

import numpy as np
import pytest

from curvhom4 import models
from curvhom4.errors import ExcludedSignature, NotSelfAdjoint, ZeroParameter
from curvhom4.linalg import SymBilinearForm, is_self_adjoint, signature_of_gram


def test_standard_inner_product_grams():
    g = models.standard_inner_product(1)
    assert np.array_equal(g, [[0, 1, 0], [1, 0, 0], [0, 0, 1]])
    assert str(signature_of_gram(g)) == "-++"
    assert str(signature_of_gram(models.standard_inner_product(-1))) == "--+"


def test_diagonalizable_F_matrix():
    F = models.diagonalizable_F(1.0)
    s = np.sqrt(3) / 2
    want = np.array([[-0.5, -s, 0], [s, -0.5, 0], [0, 0, 1]])
    assert np.allclose(F, want)
    F2 = models.diagonalizable_F(2.0)
    assert np.allclose(F2, 2 * want)
    assert abs(np.trace(F2)) < 1e-14
    assert abs(np.trace(F2 @ F2)) < 1e-13
    assert np.allclose(F @ F @ F, np.eye(3))


def test_diagonalizable_F_characteristic_roots():
    q = np.exp(2j * np.pi / 3)
    for p in (0.5, 1.0, 2.0, -1.5):
        vals = sorted(np.linalg.eigvals(models.diagonalizable_F(p)), key=lambda z: z.imag)
        want = sorted([p + 0j, p * q, p * np.conj(q)], key=lambda z: z.imag)
        assert np.allclose(vals, want)


def test_diagonalizable_F_rejects_zero():
    with pytest.raises(ZeroParameter):
        models.diagonalizable_F(0.0)


def test_diagonalizable_F_exact_matches_float():
    Fe = models.diagonalizable_F(Fraction(1, 2), exact=True)
    F = models.diagonalizable_F(0.5)
    assert np.allclose([[float(x) for x in row] for row in Fe], F)


def test_nondiagonalizable_F_structure():
    for pm in (1, -1):
        F = models.nondiagonalizable_F(pm)
        e1, e2, e3 = np.eye(3)
        assert np.array_equal(F @ e1, e3)
        assert np.array_equal(F @ e2, np.zeros(3))
        assert np.array_equal(F @ e3, pm * e2)
        assert abs(np.trace(F)) == 0
        F2 = F @ F
        assert np.any(F2 != 0) and abs(np.trace(F2)) == 0
        assert np.all(F2 @ F == 0)
        form = SymBilinearForm(models.standard_inner_product(pm))
        assert is_self_adjoint(F, form)


def test_einstein_case_trichotomy():
    ec = models.einstein_case
    assert ec(3.0 * np.eye(3)).tag == "scalar_multiple"
    assert ec(3.0 * np.eye(3)).lam == pytest.approx(3.0)
    assert ec(models.nilpotent_F()).tag == "nilpotent"
    assert ec(models.diagonalizable_F(1.0)).tag == "traceless_cube"
    for pm in (1, -1):
        assert ec(models.nondiagonalizable_F(pm)).tag == "traceless_cube"
    assert ec(np.diag([1.0, -1.0, 1.0])).tag == "not_einstein"
    assert ec(np.zeros((3, 3))).tag == "scalar_multiple"


def test_einstein_case_on_scaled_family():
    for p in (0.5, 1.0, 2.0, -0.5, -1.0, -2.0):
        assert models.einstein_case(models.diagonalizable_F(p)).tag == "traceless_cube"


def test_einstein_case_exact_mode():
    Fe = models.diagonalizable_F(Fraction(1, 2), exact=True)
    got = models.einstein_case(models.diagonalizable_F(0.5), F_exact=Fe)
    assert got.tag == "traceless_cube"
    Ze = models.scalar_F(3, exact=True)
    got = models.einstein_case(models.scalar_F(3.0), F_exact=Ze)
    assert got.tag == "scalar_multiple" and got.lam == 3.0
    Ne = models.nilpotent_F(exact=True)
    assert models.einstein_case(models.nilpotent_F(), F_exact=Ne).tag == "nilpotent"


def test_nondiag_f_squared_multiplicities():
    """F^2 of the alternate family has eigenvalue 0 with algebraic
    multiplicity 3 and geometric multiplicity 2."""
    from curvhom4.linalg import complex_spectrum

    for pm in (1, -1):
        F = models.nondiagonalizable_F(pm)
        spec = complex_spectrum(F @ F)
        assert spec.eigenvalues == ((0j, 3, 2),)
        assert not spec.diagonalizable


def test_scalar_multiple_of_f_squared_forces_zero():
    """A traceless F with F^2 = c F (c != 0) must vanish; built from random
    idempotents, the only traceless candidates that appear are zero."""
    rng = np.random.default_rng(21)
    for _ in range(100):
        # random rank-r idempotent P = B (A B)^{-1} A with A, B of rank r
        r = int(rng.integers(1, 3))
        A = rng.uniform(-1, 1, (r, 3))
        B = rng.uniform(-1, 1, (3, r))
        P = B @ np.linalg.inv(A @ B) @ A
        c = float(rng.uniform(0.5, 2.0))
        F = c * (P - (np.trace(P) / 3.0) * np.eye(3))
        # F is traceless by construction; F^2 = c' F with c' != 0 holds only
        # if P's traceless part is idempotent-like, which forces F = 0
        F2 = F @ F
        coeffs = F2.ravel() @ F.ravel() / max(F.ravel() @ F.ravel(), 1e-300)
        if np.max(np.abs(F2 - coeffs * F)) < 1e-9 and abs(coeffs) > 1e-9:
            assert np.max(np.abs(F)) < 1e-9


def test_build_family_signatures():
    assert str(models.build_family(models.ModelFamilyParams("diag", 1, 1, 1)).signature()) == "-+++"
    assert str(models.build_family(models.ModelFamilyParams("diag", 1, 1, -1)).signature()) == "--++"
    assert str(models.build_family(models.ModelFamilyParams("diag", 1, -1, 1)).signature()) == "--++"


def test_build_family_rejects_excluded_pattern():
    with pytest.raises(ExcludedSignature):
        models.build_family(models.ModelFamilyParams("diag", 1, -1, -1))
    with pytest.raises(ExcludedSignature):
        models.build_family(models.ModelFamilyParams("nondiag", 1, -1, -1))


def test_metric_lie_algebra_brackets():
    data = models.build_family(models.ModelFamilyParams("diag", 1, 1, 1))
    mla = models.build_metric_lie_algebra(data)
    u, e1, e2, e3 = np.eye(4)
    F = data.F
    got = mla.bracket(u, e1)
    assert np.allclose(got[1:], F[:, 0]) and got[0] == 0
    assert np.allclose(mla.bracket(e1, e2), 0)
    assert np.allclose(mla.bracket(u, u), 0)
    assert mla.jacobi_defect() < 1e-14


def test_metric_lie_algebra_exact_jacobi():
    data = models.build_family(models.ModelFamilyParams("diag", Fraction(1, 2), 1, -1), exact=True)
    mla = models.build_metric_lie_algebra(data)
    assert mla.jacobi_defect(exact=True) == 0.0


def test_abelian_algebra_from_zero_f():
    data = models.PetrovData(models.standard_inner_product(1), np.zeros((3, 3)), 1)
    mla = models.build_metric_lie_algebra(data)
    assert np.max(np.abs(mla.c)) == 0.0


def test_rejects_non_self_adjoint_f():
    # G F = [[0,0,0],[1,0,0],[0,0,0]] is not symmetric for the hyperbolic pair
    F = np.diag([1.0, 0.0, 0.0])
    with pytest.raises(NotSelfAdjoint):
        models.PetrovData(models.standard_inner_product(1), F, 1)


def test_manifold_fields():
    model = models.family_model("diag", 1.0, 1, 1)
    u_field = model.field([1, 0, 0, 0])
    assert np.allclose(u_field.value([0, 0, 0, 1]), [0, 0, 0, 1])
    # u at (e1, 2) is (-F e1, 2)
    F = model.data.F
    got = u_field.value([1, 0, 0, 2])
    assert np.allclose(got, [*(-F[:, 0]), 2.0])
    e2_field = model.field([0, 0, 1, 0])
    assert np.allclose(e2_field.value([0.3, -0.7, 0.2, 5.0]), [0, 1, 0, 0])


def test_bracket_oracle_exact_on_affine_fields():
    rng = np.random.default_rng(2)
    for variant in ("diag", "nondiag"):
        model = models.family_model(variant, 1.0, 1, 1)
        pts = [np.concatenate([rng.uniform(-1, 1, 3), rng.uniform(0.5, 2, 1)]) for _ in range(20)]
        for i in range(4):
            for j in range(4):
                dev = models.bracket_oracle(model, np.eye(4)[i], np.eye(4)[j], pts)
                assert dev < 1e-14
