"""Model analysis pipeline and the deterministic verification battery.

``analyze`` builds every derived object for one model (connection, curvature,
bivector calculus, eigenframe chain, Killing structure); ``verify_rows``
turns the identity suite into named check rows, and ``classification_of``
feeds the algebraic invariants to the decision table.  The command-line
front end and the test suite share these entry points.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import bivectors, curvature, expmap, frames, models
from .classify import EigenPattern, ClassificationResult, classify as classify_table, eigen_pattern as eigen_pattern_fn, weyl_trace_identities
from .curvature import gen_maxabs
from .errors import CurvHomError, NotDiagonalizable
from .linalg import TOL, complex_spectrum, is_complex_diagonalizable


@dataclass
class ModelBundle:
    """Everything derived from one model for one orientation."""

    params: models.ModelFamilyParams
    orientation: int
    data: models.PetrovData
    model: models.ManifoldModel
    mla: models.MetricLieAlgebra
    conn: curvature.FrameConnection
    R: curvature.CurvatureTensor
    summary: curvature.CurvatureSummary
    space: bivectors.BivectorSpace
    star: bivectors.HodgeStar
    weyl: bivectors.WeylDecomposition
    split: bivectors.SelfDualSplit
    E: bivectors.ComplexE
    r_op: np.ndarray
    cdiag: bool
    frame: frames.OrthoEigenFrame | None = None
    forms: frames.ConnectionOneForms | None = None
    wdata: frames.WeylDiagonalData | None = None
    div: frames.DivergenceResult | None = None
    ks: frames.KillingStructure | None = None
    frame_error: str | None = None


def _exact_fraction(p) -> Fraction | None:
    try:
        f = Fraction(p)
    except (TypeError, ValueError):
        return None
    if f.denominator > 10**6 or abs(f.numerator) > 10**9:
        return None  # representable, but exact arithmetic would be pointless
    if abs(float(f) - float(p)) == 0.0:
        return f
    return None


def analyze(
    params: models.ModelFamilyParams,
    orientation: int = 1,
    tol: float = TOL,
    exact: bool | None = None,
) -> ModelBundle:
    """Build the full derived pipeline for one family member."""
    if exact is None:
        exact = _exact_fraction(params.p) is not None
    if exact:
        params = models.ModelFamilyParams(
            params.variant, _exact_fraction(params.p), params.pm_sign, params.delta
        )
    data = models.build_family(params, exact=exact)
    model = models.build_manifold_model(data)
    mla = model.mla
    conn = curvature.levi_civita(mla, exact=exact)
    R = curvature.curvature_tensor(conn, mla, exact=exact)
    summary = curvature.curvature_summary(conn, R, mla, tol)
    space = bivectors.bivector_space(mla, orientation, tol)
    star = bivectors.hodge_star(space, tol)
    weyl = bivectors.schouten_weyl(R, summary.ricci, summary.scalar, mla, space)
    split = bivectors.selfdual_split(star, space, tol)
    E = bivectors.build_E(space, star, split, weyl.weyl_op, tol)
    r_op = bivectors.curvature_operator(R, space)
    cdiag = is_complex_diagonalizable(r_op, tol)
    bundle = ModelBundle(
        params, orientation, data, model, mla, conn, R, summary,
        space, star, weyl, split, E, r_op, cdiag,
    )
    try:
        bundle.frame = frames.normalized_frame(E, tol)
        bundle.forms = frames.connection_forms(bundle.frame, conn, mla, tol)
        bundle.wdata = frames.weyl_components(bundle.frame, weyl.weyl_op, bundle.forms, tol)
        bundle.div = frames.divergence_check(bundle.wdata, bundle.forms, bundle.frame, mla, tol)
    except NotDiagonalizable as exc:
        bundle.frame_error = str(exc)
    ecase = models.einstein_case(data.F, tol, F_exact=data.F_exact)
    if ecase.tag == "traceless_cube" and cdiag:
        bundle.ks = frames.build_killing_structure(data, mla, tol, exact=exact)
    return bundle


def eigen_pattern_of(bundle: ModelBundle, tol: float = TOL) -> EigenPattern:
    spec = complex_spectrum(bundle.E.w_plus, tol)
    return eigen_pattern_fn(spec, tol)


def classification_of(bundle: ModelBundle, tol: float = TOL) -> ClassificationResult:
    return classify_table(
        bundle.data.signature(),
        bundle.summary.einstein,
        bundle.cdiag,
        bundle.summary.locally_symmetric,
        eigen_pattern_of(bundle, tol),
        bundle.summary.ricci_flat,
    )


# ---------------------------------------------------------------------------
# Check rows.
# ---------------------------------------------------------------------------


def _row(name: str, dev, passed: bool, note: str = "") -> dict:
    return {
        "name": name,
        "passed": bool(passed),
        "max_abs_error": float(dev),
        "note": note,
    }


def _drow(name: str, dev, thresh: float, note: str = "") -> dict:
    return _row(name, dev, dev <= thresh, note)


def verify_rows(bundle: ModelBundle, seed: int = 0, tol: float = TOL) -> list:
    """The full identity battery for one model, as named check rows."""
    rows = []
    rng = np.random.default_rng(seed)
    mla = bundle.mla
    data = bundle.data
    summary = bundle.summary
    variant = bundle.params.variant

    rows.append(_drow("jacobi_identity", mla.jacobi_defect(), tol))
    rows.append(_drow("connection_torsion_free", bundle.conn.torsion_defect(mla), tol))
    rows.append(_drow("connection_metric_compatible", bundle.conn.metric_defect(mla), tol))
    rows.append(
        _drow(
            "connection_matches_closed_form",
            gen_maxabs(bundle.conn.gamma - curvature.petrov_connection(data)),
            tol,
        )
    )
    for name, dev in bundle.R.symmetry_defects().items():
        rows.append(_drow(f"curvature_{name}", dev, 1e-12 * (1 + gen_maxabs(bundle.R.Rdown))))
    rows.append(
        _drow(
            "curvature_matches_closed_form",
            gen_maxabs(bundle.R.Rdown - curvature.petrov_curvature(data)),
            tol,
        )
    )
    rows.append(
        _drow(
            "ricci_matches_closed_form",
            gen_maxabs(summary.ricci - curvature.petrov_ricci(data)),
            tol,
        )
    )
    rows.append(
        _drow(
            "nabla_r_matches_closed_form",
            curvature.nabla_r_oracle_defect(data, bundle.conn, bundle.R, mla),
            tol,
        )
    )
    if data.exact:
        rows.append(
            _row(
                "exact_closed_forms",
                0.0,
                _exact_oracle_equal(bundle),
                "connection, curvature, Ricci and nabla R agree exactly",
            )
        )

    expect_ricci_flat = variant in ("diag", "nondiag")
    rows.append(
        _row(
            "einstein_flag",
            gen_maxabs(summary.ricci - (summary.scalar / 4.0) * mla.gram),
            summary.einstein,
            "Ric = (s/4) g",
        )
    )
    if expect_ricci_flat:
        rows.append(_drow("ricci_flat", gen_maxabs(summary.ricci), 1e-12))
        rows.append(
            _row(
                "not_locally_symmetric",
                gen_maxabs(summary.nabla_R),
                not summary.locally_symmetric,
                "nabla R != 0",
            )
        )
    else:
        rows.append(
            _row(
                "locally_symmetric",
                gen_maxabs(summary.nabla_R),
                summary.locally_symmetric,
                "constant curvature",
            )
        )

    pts = expmap.sample_points(rng, 20, mla.dim - 1)
    worst = 0.0
    for i in range(mla.dim):
        for j in range(mla.dim):
            a = np.eye(mla.dim)[i]
            b = np.eye(mla.dim)[j]
            worst = max(worst, models.bracket_oracle(bundle.model, a, b, pts))
    rows.append(_drow("bracket_oracle_all_pairs", worst, tol))

    # bivector level
    g6_dev = 0.0
    for I, (a, b) in enumerate(bivectors.PAIRS):
        for J, (c, d) in enumerate(bivectors.PAIRS):
            want = mla.gram[a, c] * mla.gram[b, d] - mla.gram[a, d] * mla.gram[b, c]
            g6_dev = max(g6_dev, abs(bundle.space.gram6[I, J] - want))
    rows.append(_drow("bivector_metric_identity", g6_dev, tol))
    battery = bivectors.bivector_identity_battery(bundle.space, rng)
    for name, dev in battery.items():
        rows.append(_drow(f"bivector_{name}", dev, 1e-10))

    sq = bundle.star.square_sign
    rows.append(
        _drow(
            "star_square_sign",
            gen_maxabs(bundle.star.matrix @ bundle.star.matrix - sq * np.eye(6)),
            1e-12,
            f"star^2 = {sq:+d} Id",
        )
    )
    rows.append(_drow("star_duality", bivectors.star_duality_defect(bundle.space, bundle.star), 1e-12))
    if sq == 1:
        m = bundle.space.gram6 @ bundle.star.matrix
        rows.append(_drow("star_self_adjoint", gen_maxabs(m - m.T), 1e-12))
    else:
        m = bundle.star.matrix.T @ bundle.space.gram6 @ bundle.star.matrix
        rows.append(_drow("star_isometry", gen_maxabs(m - sq * bundle.space.gram6), 1e-12))

    rows.append(
        _drow(
            "curvature_operator_self_adjoint",
            bivectors.self_adjoint_defect6(bundle.r_op, bundle.space),
            1e-12 * (1 + gen_maxabs(bundle.r_op)),
        )
    )
    # block structure of the curvature operator
    F2 = data.F @ data.F
    rows.append(
        _drow(
            "curvature_operator_h_block",
            max(
                gen_maxabs(bundle.r_op[:3, :3] + data.delta * F2),
                gen_maxabs(bundle.r_op[3:, :3]),
                gen_maxabs(bundle.r_op[:3, 3:]),
            ),
            tol,
            "block on u-wedge-V equals -delta F^2",
        )
    )
    rows.append(
        _drow(
            "curvature_star_commutator",
            bivectors.commutator_with_star(bundle.r_op, bundle.star),
            1e-12 * (1 + gen_maxabs(bundle.r_op)),
        )
    )
    rows.append(_drow("weyl_einstein_witness", bundle.weyl.einstein_witness, 1e-12))
    rows.append(_drow("weyl_trace_free", bivectors.weyl_trace_defect(bundle.weyl.weyl_op), 1e-12))
    if bundle.split.kind == "real_split":
        plus, minus = bundle.split.plus_basis, bundle.split.minus_basis
        dev = gen_maxabs(plus.T @ bundle.space.gram6 @ minus)
        rows.append(_drow("selfdual_split_orthogonal", dev, 1e-10))
        dev = max(
            gen_maxabs(bundle.star.matrix @ plus - plus),
            gen_maxabs(bundle.star.matrix @ minus + minus),
        )
        rows.append(_drow("selfdual_split_eigen", dev, 1e-10))
        winv = gen_maxabs(minus.T @ bundle.space.gram6 @ (bundle.weyl.weyl_op @ plus))
        rows.append(_drow("weyl_preserves_split", winv, 1e-10 * (1 + gen_maxabs(bundle.weyl.weyl_op))))
    else:
        dev = gen_maxabs(bundle.star.matrix @ bundle.star.matrix + np.eye(6))
        rows.append(_drow("complex_structure_square", dev, 1e-12))

    proj = bivectors.project_H_iso(bundle.space, bundle.star, bundle.weyl.weyl_op)
    if proj["kind"] == "projection":
        ok = proj["invertible"] and proj["conjugation_defect"] <= 1e-9
        rows.append(
            _row("selfdual_projection_isomorphism", proj["conjugation_defect"], ok,
                 "projection conjugates W on u-wedge-V to the self-dual part")
        )
    else:
        ok = proj["complex_rank"] == 3 and proj["extension_defect"] <= 1e-9
        rows.append(
            _row("complex_span_extension", proj["extension_defect"], ok,
                 "u-wedge-V spans the bivectors over C; W is its extension")
        )

    # E and the Weyl morphism
    wp_spec = complex_spectrum(bundle.E.w_plus, tol)
    vals6 = sorted(
        np.linalg.eigvals(bundle.weyl.weyl_op), key=lambda z: (round(z.real, 9), round(z.imag, 9))
    )
    vals_split = sorted(
        list(wp_spec.values()) + [np.conj(v) for v in wp_spec.values()],
        key=lambda z: (round(z.real, 9), round(z.imag, 9)),
    )
    dev = max(abs(a - b) for a, b in zip(vals6, vals_split))
    rows.append(
        _drow("weyl_morphism_equivalence", dev, 1e-8 * (1 + gen_maxabs(bundle.weyl.weyl_op)),
              "spectrum of the E-morphism + conjugates = spectrum on bivectors")
    )
    lam_sorted = wp_spec.values()
    rows.append(
        _drow(
            "weyl_trace_identity_pair",
            weyl_trace_identities(*lam_sorted[:3], summary.scalar),
            1e-9 * (1 + max(abs(v) for v in lam_sorted) ** 2),
        )
    )

    expect_cdiag = variant != "nondiag"
    rows.append(
        _row(
            "curvature_operator_cdiag",
            0.0,
            bundle.cdiag == expect_cdiag,
            f"cdiag={bundle.cdiag}, expected {expect_cdiag}"
            + ("" if expect_cdiag else " (expected-false control)"),
        )
    )

    if bundle.frame is not None:
        rows.extend(_frame_rows(bundle, tol))
    else:
        rows.append(
            _row(
                "eigenframe_skipped",
                0.0,
                variant == "nondiag",
                bundle.frame_error or "no diagonalizable Weyl morphism",
            )
        )

    rows.extend(_expmap_rows(bundle, rng))

    try:
        result = classification_of(bundle, tol)
        expected = _expected_class(bundle)
        rows.append(
            _row(
                "classification",
                0.0,
                result.case == expected,
                f"{result.case} (expected {expected})",
            )
        )
    except CurvHomError as exc:
        rows.append(_row("classification", 0.0, False, f"error: {exc}"))
    return rows


def _expected_class(bundle: ModelBundle) -> str:
    variant = bundle.params.variant
    pattern = str(bundle.data.signature())
    if variant == "nondiag":
        return "not_cdiagonalizable"
    if variant == "diag":
        return (
            "petrov_ricci_flat_lorentz" if pattern == "-+++" else "petrov_ricci_flat_neutral"
        )
    if variant == "const":
        # the parallel neutral branch is outside the classified families
        return "constant_curvature" if pattern == "-+++" else "out_of_scope"
    return "out_of_scope"


def _exact_oracle_equal(bundle: ModelBundle) -> bool:
    data = bundle.data
    mla = bundle.mla
    conn_cf = curvature.petrov_connection(data, exact=True)
    if not _obj_equal(bundle.conn.gamma_exact, conn_cf):
        return False
    curv_cf = curvature.petrov_curvature(data, exact=True)
    if not _obj_equal(bundle.R.Rdown_exact, curv_cf):
        return False
    ric_cf = curvature.petrov_ricci(data, exact=True)
    if not _obj_equal(bundle.summary.ricci_exact, ric_cf):
        return False
    dev = curvature.nabla_r_oracle_defect(data, bundle.conn, bundle.R, mla, exact=True)
    return dev == 0.0


def _obj_equal(a, b) -> bool:
    if a is None or b is None:
        return False
    return all(x == y for x, y in zip(np.asarray(a).ravel(), np.asarray(b).ravel()))


def _frame_rows(bundle: ModelBundle, tol: float) -> list:
    rows = []
    frame, forms, wdata, div = bundle.frame, bundle.forms, bundle.wdata, bundle.div
    defects = frame.product_defects()
    scale = 1.0 + max(abs(v) for v in frame.lambdas)
    rows.append(_drow("frame_products", max(defects["squares"], defects["products"]), 1e-10))
    rows.append(_drow("frame_h_normalization", defects["h_gram"], 1e-10))
    rows.append(_drow("frame_xi_expansion", forms.expansion_defect, 1e-10 * scale))
    rows.append(_drow("frame_xi_relations", forms.relation_defect, 1e-10 * scale))
    rows.append(_drow("frame_weyl_expansion", wdata.expansion_defect, 1e-10 * scale))
    rows.append(_drow("frame_mu_consistency", wdata.mu_consistency, 1e-10 * scale))
    rows.append(_drow("divergence_theta_route", div.route_theta, 1e-10 * scale**2))
    rows.append(_drow("divergence_reduced_route", div.route_reduced, 1e-10 * scale**2))
    rows.append(_drow("divergence_common_field", div.spread, 1e-10 * scale**2))
    flag, crit_dev, direct = frames.parallel_criterion(wdata, forms, frame, tol)
    direct_flag = direct <= 1e3 * tol * scale
    rows.append(
        _row(
            "parallel_criterion_agreement",
            abs(float(flag) - float(direct_flag)),
            flag == direct_flag,
            f"criterion={flag}, direct nabla W={direct:.3e}",
        )
    )
    se = frames.structure_equation_check(
        forms, frame, bundle.mla, bundle.weyl.weyl_op, bundle.summary.scalar, tol
    )
    rows.append(_drow("structure_equation", se, 1e-10 * scale**2))
    if bundle.ks is not None:
        ks_defects = bundle.ks.relation_defects(bundle.mla)
        ks_scale = 1.0 + abs(bundle.ks.gamma) ** 2
        rows.append(_drow("killing_structure_gram", ks_defects["gram"], 1e-9 * ks_scale))
        rows.append(_drow("killing_structure_brackets", ks_defects["bracket"], 1e-9 * ks_scale))
        rows.append(_drow("killing_structure_cubic_roots", ks_defects["cubic_roots"], 1e-10 * ks_scale))
    for name, dev, passed, note in frames.identity_battery(
        frame, forms, wdata, div, bundle.conn, bundle.mla, bundle.summary.scalar, bundle.ks, tol
    ):
        rows.append(_row(f"chain_{name}", dev, passed, note))
    if bundle.div is not None:
        rows.append(_drow("killing_commutant_brackets", _killing_commutes(bundle), 1e-6))
    return rows


def _killing_commutes(bundle: ModelBundle) -> float:
    """[w, y] = [v_j, y] = 0 for commutant fields y, at sample points."""
    rng = np.random.default_rng(7)
    pts = expmap.sample_points(rng, 10, bundle.mla.dim - 1)
    fields = expmap.commutant_fields(bundle.model)
    worst = 0.0
    vecs = [bundle.div.w] + [bundle.frame.alphas[j] @ bundle.div.w for j in range(3)]
    for vec in vecs:
        re_f = bundle.model.field(vec.real)
        im_f = bundle.model.field(vec.imag)
        for y in fields:
            for pt in pts:
                bre = expmap.field_bracket_fd(re_f.value, y, pt)
                bim = expmap.field_bracket_fd(im_f.value, y, pt)
                worst = max(worst, float(np.max(np.abs(bre))), float(np.max(np.abs(bim))))
    return worst


def _expmap_rows(bundle: ModelBundle, rng: np.random.Generator) -> list:
    rows = []
    model = bundle.model
    worst = 0.0
    for _ in range(50):
        A = rng.uniform(-2.0, 2.0, (4, 4))
        dev = gen_maxabs(A @ expmap.q_of_operator(A) - (np.eye(4) - expmap.expm_series(-A)))
        worst = max(worst, dev)
    rows.append(_drow("q_series_identity", worst, 1e-10))

    y0 = np.zeros(model.n)
    y0[-1] = 1.0
    worst = 0.0
    vs = [
        np.array([1.0, 0, 0, 0]),
        np.array([0.5, 1.0, 0, 0]),
        np.array([0.3, -0.2, 0.4, 0.1]),
    ]
    dirs = [np.eye(4)[i] for i in (0, 1, 3)]
    for v in vs:
        for d in dirs:
            for s in (0.5, 1.0, 1.5):
                res = expmap.differential_check(model, y0, s * v, d)
                worst = max(worst, res["deviation"])
    rows.append(_drow("exp_differential_formula", worst, 1e-6, "27-case grid"))

    worst = 0.0
    h = 1e-5
    for w_idx in (1, 0):
        w = np.eye(4)[w_idx]
        pb = expmap.pullback_field(model, w)
        for v in vs:
            pbv = pb(v)
            fd = (
                expmap.exp_map(model, y0, v + h * pbv) - expmap.exp_map(model, y0, v - h * pbv)
            ) / (2 * h)
            target = model.field(w).value(expmap.exp_map(model, y0, v))
            worst = max(worst, gen_maxabs(fd - target))
    rows.append(_drow("pullback_e_related", worst, 1e-6))

    for a in (0.5, 1.0):
        end = expmap.exp_map(model, y0, np.array([a, 0, 0, 0]))
        dev = abs(end[-1] - np.exp(a))
        rows.append(_drow(f"exp_u_endpoint_a={a}", dev, 1e-10, "t-coordinate e^a"))

    v = np.array([0.7, 0.3, -0.5, 0.2])
    worst = 0.0
    for t in (0.25, 0.5, 0.75):
        a = expmap.exp_map(model, y0, t * v)
        b = expmap.flow(model, v, y0, t).endpoint
        worst = max(worst, gen_maxabs(a - b))
    rows.append(_drow("exp_scaling_property", worst, 1e-9))

    rows.append(_drow("commutant_killing", expmap.commutant_killing_check(model), 1e-6))
    rows.append(
        _drow("mixed_partial_bracket", expmap.mixed_partial_bracket_check(model, y0), 1e-5)
    )
    return rows


# ---------------------------------------------------------------------------
# Report assembly.
# ---------------------------------------------------------------------------


def _fmt(x) -> float:
    return float(format(float(x), ".17g"))


def _matrix_json(m) -> list:
    m = np.asarray(m)
    if np.iscomplexobj(m):
        return [[[_fmt(x.real), _fmt(x.imag)] for x in row] for row in m]
    return [[_fmt(x) for x in row] for row in m]


def model_descriptor(bundle: ModelBundle) -> dict:
    data = bundle.data
    nz = []
    for i in range(bundle.mla.dim):
        for j in range(bundle.mla.dim):
            for k in range(bundle.mla.dim):
                if abs(bundle.mla.c[i, j, k]) > 1e-15:
                    nz.append([i, j, k, _fmt(bundle.mla.c[i, j, k])])
    return {
        "variant": bundle.params.variant,
        "p": _fmt(bundle.params.p),
        "pm_sign": bundle.params.pm_sign,
        "delta": bundle.params.delta,
        "orientation": bundle.orientation,
        "basis": list(bundle.mla.labels),
        "signature": str(data.signature()),
        "gram": _matrix_json(bundle.mla.gram),
        "f_matrix": _matrix_json(data.F),
        "structure_constants": nz,
        "einstein_case": models.einstein_case(data.F).tag,
    }


def spectra_of(bundle: ModelBundle) -> dict:
    r6 = complex_spectrum(bundle.r_op)
    wp = complex_spectrum(bundle.E.w_plus)
    return {
        "curvature_operator": [[_fmt(v.real), _fmt(v.imag)] for v in r6.values()],
        "weyl_morphism": [[_fmt(v.real), _fmt(v.imag)] for v in wp.values()],
        "cdiag": bundle.cdiag,
    }


def build_report(bundle: ModelBundle) -> dict:
    return {
        "command": "build",
        "model": model_descriptor(bundle),
        "spectra": spectra_of(bundle),
    }


def verify_report(bundle: ModelBundle, seed: int = 0, tol: float = TOL) -> dict:
    rows = verify_rows(bundle, seed=seed, tol=tol)
    for row in rows:
        row["max_abs_error"] = _fmt(row["max_abs_error"])
    return {
        "command": "verify",
        "model": model_descriptor(bundle),
        "seed": seed,
        "checks": rows,
        "all_passed": all(r["passed"] for r in rows),
    }


def classify_report(bundle: ModelBundle, tol: float = TOL) -> dict:
    result = classification_of(bundle, tol)
    pattern = eigen_pattern_of(bundle, tol)
    extra = {}
    if bundle.params.variant == "const":
        lam = float(np.trace(bundle.data.F) / 3.0)
        extra["sectional_curvature"] = _fmt(-bundle.params.delta * lam**2)
    return {
        "command": "classify",
        "model": model_descriptor(bundle),
        "classification": {
            "case": result.case,
            "evidence": [[k, (v if isinstance(v, (bool, str)) else _fmt(v))] for k, v in result.evidence],
            "eigen_pattern": pattern.pattern,
            "lambda": [_fmt(pattern.lam.real), _fmt(pattern.lam.imag)],
            **extra,
        },
        "spectra": spectra_of(bundle),
    }
