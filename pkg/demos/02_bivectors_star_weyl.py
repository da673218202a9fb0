"""Hodge star, the curvature operator on bivectors, and Weyl eigenvalues.

For the cube-root family the curvature operator has the spectrum
{-delta p^2, -delta p^2 q, -delta p^2 conj q}, each eigenvalue twice; the
restriction to the rank-3 complex bundle realizes the triple once.
"""

import numpy as np

import curvhom4 as ch
from curvhom4.linalg import complex_spectrum

np.set_printoptions(precision=4, suppress=True)

for pm, delta in [(1, 1), (1, -1)]:
    b = ch.report.analyze(ch.ModelFamilyParams("diag", 1, pm, delta))
    print(f"--- sign {pm:+d}, delta {delta:+d}: pattern {b.data.signature()}")
    print(f"star^2 sign            : {b.star.square_sign:+d}")
    print(f"duality pairing defect : {ch.bivectors.star_duality_defect(b.space, b.star):.2e}")
    print(f"[R, star] max-abs      : {ch.commutator_with_star(b.r_op, b.star):.2e}")

    spec = complex_spectrum(b.r_op)
    print("curvature operator spectrum (value, algebraic, geometric):")
    for v, a, g in spec.eigenvalues:
        print(f"  {v:+.4f}  x{a} (geometric {g})")

    print(f"Weyl morphism kind     : {b.E.kind}")
    print("Weyl morphism eigenvalues:", np.round(np.linalg.eigvals(b.E.w_plus), 4))
    print(f"Einstein witness |R - W - (s/12)Id| = {b.weyl.einstein_witness:.2e}")
    print()

# the nondiagonalizable variant: Ricci-flat with a nilpotent curvature operator
b = ch.report.analyze(ch.ModelFamilyParams("nondiag", 1, 1, 1))
spec = complex_spectrum(b.r_op)
print("nondiagonalizable variant:")
print("  cdiag:", b.cdiag, " spectrum entries:", spec.eigenvalues)
