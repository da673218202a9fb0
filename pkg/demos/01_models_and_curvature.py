"""Build the cube-root model family and inspect its curvature.

The construction: on V = C x R take the inner product Im(z z') +- t t' and
the self-adjoint operator F(z, t) = (p q z, p t) with q = exp(2 pi i / 3).
The metric Lie algebra [u, v] = F v with g(u, u) = delta is Ricci-flat but
not locally symmetric, in Lorentzian or neutral signature depending on the
sign choices.
"""

import numpy as np

import curvhom4 as ch

np.set_printoptions(precision=4, suppress=True)

for pm, delta, label in [(1, 1, "Lorentzian"), (1, -1, "neutral"), (-1, 1, "neutral")]:
    model = ch.family_model("diag", 1.0, pm, delta)
    mla = model.mla
    print(f"--- sign {pm:+d}, delta {delta:+d}: {label}, pattern {model.data.signature()}")
    print("metric Gram on the frame (u, e1, e2, e3):")
    print(mla.gram)

    conn = ch.levi_civita(mla)
    R = ch.curvature_tensor(conn, mla)
    summary = ch.curvature_summary(conn, R, mla)
    print(f"Ricci max |entry|      : {np.max(np.abs(summary.ricci)):.2e}")
    print(f"scalar curvature       : {summary.scalar:.2e}")
    print(f"locally symmetric      : {summary.locally_symmetric}")
    print(f"max |nabla R|          : {np.max(np.abs(summary.nabla_R)):.4f}")

    # the covariant derivative of R matches its closed form on V-directions
    dev = ch.curvature.nabla_r_oracle_defect(model.data, conn, R, mla)
    print(f"closed-form nabla R dev: {dev:.2e}")
    print()

# the scalar case: constant sectional curvature -delta lambda^2
model = ch.family_model("const", 2.0, 1, 1)
conn = ch.levi_civita(model.mla)
R = ch.curvature_tensor(conn, model.mla)
rng = np.random.default_rng(0)
ks = []
while len(ks) < 5:
    x, y = rng.uniform(-1, 1, 4), rng.uniform(-1, 1, 4)
    try:
        ks.append(ch.sectional_curvature(R, model.mla, x, y))
    except ch.curvature.DegeneratePlane:
        continue
print("constant-curvature case, lambda = 2, delta = +1:")
print("sampled sectional curvatures:", np.round(ks, 10), "(expect -4)")
