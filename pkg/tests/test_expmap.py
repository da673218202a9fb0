"""Exponential map, its differential, pullbacks, and the commutant fields."""

from fractions import Fraction

import numpy as np
import pytest

from curvhom4 import expmap, models
from curvhom4.errors import SingularQ

from conftest import get_bundle

Y0 = np.array([0.0, 0.0, 0.0, 1.0])


def _model(variant="diag", pm=1, delta=1):
    return get_bundle(variant, Fraction(1), pm, delta).model


def test_q_of_zero_is_identity():
    assert np.allclose(expmap.q_of_operator(np.zeros((3, 3))), np.eye(3))


def test_q_scalar_value():
    got = expmap.q_of_operator(np.array([[1.0]]))[0, 0]
    assert got == pytest.approx(1.0 - np.exp(-1.0), abs=1e-12)
    assert got == pytest.approx(0.6321205588, abs=1e-9)


def test_q_operator_identity_random():
    rng = np.random.default_rng(14)
    for _ in range(50):
        A = rng.uniform(-2.0, 2.0, (4, 4))
        lhs = A @ expmap.q_of_operator(A)
        rhs = np.eye(4) - expmap.expm_series(-A)
        assert np.max(np.abs(lhs - rhs)) <= 1e-10


def test_q_matches_eigenvalues_for_ad_su():
    """ad(s u) has eigenvalues {0, sp, spq, sp conj q}; Q maps them pointwise."""
    model = _model()
    s = 0.7
    A = expmap.ad_matrix(model, [s, 0, 0, 0])
    QA = expmap.q_of_operator(A)
    got = sorted(np.linalg.eigvals(QA), key=lambda z: (round(z.real, 9), round(z.imag, 9)))

    def qfun(z):
        return 1.0 if z == 0 else (1 - np.exp(-z)) / z

    q3 = np.exp(2j * np.pi / 3)
    want = sorted(
        [qfun(0), qfun(s), qfun(s * q3), qfun(s * np.conj(q3))],
        key=lambda z: (round(np.real(z), 9), round(np.imag(z), 9)),
    )
    assert all(abs(a - b) <= 1e-10 for a, b in zip(want, got))


def test_flow_constant_field():
    model = _model()
    res = expmap.flow(model, [0, 1, 0, 0], Y0, 1.0)
    assert np.allclose(res.endpoint, [1, 0, 0, 1], atol=1e-12)
    assert res.error_estimate <= 1e-10


def test_flow_pure_u_direction():
    model = _model()
    for a in (0.5, 1.0, -0.3):
        res = expmap.flow(model, [a, 0, 0, 0], Y0, 1.0)
        assert abs(res.endpoint[-1] - np.exp(a)) <= 1e-10
        assert np.max(np.abs(res.endpoint[:3])) <= 1e-12


def test_flow_matches_variation_of_constants():
    """Mixed direction u + e3: x(T) = T Q(T a F) v against the integrator."""
    model = _model()
    v = np.array([1.0, 0, 0, 1.0])
    res = expmap.flow(model, v, Y0, 1.0)
    F = model.data.F
    want_x = expmap.q_of_operator(F) @ np.array([0.0, 0, 1.0])
    assert np.max(np.abs(res.endpoint[:3] - want_x)) <= 1e-9
    assert res.endpoint[-1] == pytest.approx(np.e, abs=1e-10)


def test_exp_map_at_zero():
    model = _model()
    assert np.allclose(expmap.exp_map(model, Y0, np.zeros(4)), Y0)


def test_exp_scaling_property():
    model = _model("nondiag")
    v = np.array([0.4, -0.3, 0.6, 0.2])
    for t in (0.25, 0.5, 0.75):
        a = expmap.exp_map(model, Y0, t * v)
        b = expmap.flow(model, v, Y0, t).endpoint
        assert np.max(np.abs(a - b)) <= 1e-9


def test_differential_grid_both_variants():
    rng = np.random.default_rng(6)
    for variant in ("diag", "nondiag"):
        model = _model(variant)
        worst = 0.0
        for vscale in (0.5, 1.0, 1.5):
            for vi in range(3):
                v = vscale * np.array([[1.0, 0, 0, 0], [0.5, 1, 0, 0], [0.3, -0.2, 0.4, 0.1]])[vi]
                for d in (np.eye(4)[0], np.eye(4)[1], np.eye(4)[3]):
                    res = expmap.differential_check(model, Y0, v, d)
                    worst = max(worst, res["deviation"])
        assert worst <= 1e-6


def test_differential_at_zero():
    model = _model()
    res = expmap.differential_check(model, Y0, np.zeros(4), np.eye(4)[2])
    assert res["deviation"] <= 1e-9


def test_pullback_at_zero_and_abelian():
    model = _model()
    pb = expmap.pullback_field(model, [0, 1, 0, 0])
    assert np.allclose(pb(np.zeros(4)), [0, 1, 0, 0])
    abelian = models.build_manifold_model(
        models.PetrovData(np.eye(3), np.zeros((3, 3)), 1)
    )
    pb = expmap.pullback_field(abelian, [0.3, 1, 2, 3])
    for v in (np.zeros(4), np.array([1.0, -2, 0.5, 0])):
        assert np.allclose(pb(v), [0.3, 1, 2, 3])


def test_pullback_e_related():
    model = _model()
    h = 1e-5
    for w in (np.eye(4)[1], np.eye(4)[0]):
        pb = expmap.pullback_field(model, w)
        for v in (np.array([1.0, 0, 0, 0]), np.array([0.5, 0.2, -0.1, 0.3])):
            pbv = pb(v)
            fd = (
                expmap.exp_map(model, Y0, v + h * pbv)
                - expmap.exp_map(model, Y0, v - h * pbv)
            ) / (2 * h)
            target = model.field(w).value(expmap.exp_map(model, Y0, v))
            assert np.max(np.abs(fd - target)) <= 1e-6


def test_pullback_singular_q_detected():
    """An eigenvalue of ad v at 2 pi i k (k != 0) makes Q singular; for the
    cube-root family this happens at v = 2 pi / (p sqrt 3) * u + ..., where
    the rotation pair of ad(su) hits +-2 pi i / sqrt(3) * ... scaled to land
    on the singular set."""
    model = _model()
    # ad(su) eigenvalues: {0, s, s q, s conj q}; s q has imaginary part
    # s sqrt(3)/2, so s = 4 pi / sqrt(3) puts it at real - 2 pi i... the
    # real part keeps it off the singular set, so use the nondiagonalizable
    # trick instead: scale to put a purely imaginary pair at 2 pi i.
    # For this family no real multiple of u works, so check a synthetic
    # algebra: the abelian one extended is regular everywhere; instead
    # verify the guard fires on a doctored operator.
    with pytest.raises(SingularQ):
        # build a fake model call: directly check via pullback on a rotation
        # algebra where ad has eigenvalues +-2 pi i: F = rotation generator
        data = models.PetrovData(np.eye(3), np.zeros((3, 3)), 1)
        m = models.build_manifold_model(data)
        # overwrite the structure constants with a rotation bracket:
        c = np.zeros((4, 4, 4))
        c[0, 1, 2] = 2 * np.pi
        c[1, 0, 2] = -2 * np.pi
        c[0, 2, 1] = -2 * np.pi
        c[2, 0, 1] = 2 * np.pi
        mla = models.MetricLieAlgebra(c, np.eye(4), ("u", "e1", "e2", "e3"))
        fake = models.ManifoldModel(data, mla)
        expmap.pullback_field(fake, [0, 1, 0, 0])(np.array([1.0, 0, 0, 0]))


def test_commutant_fields_commute_and_are_killing():
    rng = np.random.default_rng(15)
    for variant in ("diag", "nondiag"):
        model = _model(variant)
        pts = expmap.sample_points(rng, 5)
        for f in expmap.commutant_fields(model):
            assert expmap.commutes_with_algebra_defect(model, f, pts) <= 1e-6
        assert expmap.commutant_killing_check(model, n_points=10, seed=0) <= 1e-6


def test_commutant_killing_abelian_translations():
    data = models.PetrovData(np.eye(3), np.zeros((3, 3)), 1)
    model = models.build_manifold_model(data)
    assert expmap.commutant_killing_check(model, n_points=5, seed=1) <= 1e-9


def test_non_commutant_field_is_not_killing():
    model = _model()
    rng = np.random.default_rng(16)
    pts = expmap.sample_points(rng, 5)

    def bad(pt):
        return np.array([pt[0] ** 2, 0.0, 0.0, np.sin(pt[3])])

    worst = max(
        np.max(np.abs(expmap.lie_derivative_metric(model, bad, pt))) for pt in pts
    )
    assert worst > 1e-2


def test_mixed_partial_bracket_identity():
    for variant in ("diag", "nondiag"):
        model = _model(variant)
        dev = expmap.mixed_partial_bracket_check(model, Y0, n_samples=5, seed=0)
        assert dev <= 1e-5
