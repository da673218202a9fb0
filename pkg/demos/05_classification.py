"""The algebraic classifier over the model families.

An Einstein 4-metric with complex-diagonalizable curvature operator and
constant eigenvalues is either locally symmetric or locally isometric to a
cube-root family member; the decision table consumes the signature, the
parallelism of the Weyl morphism, and the eigenvalue pattern.
"""

from curvhom4 import ModelFamilyParams, report

CASES = [
    ("diag", 1, 1, 1, "Ricci-flat Lorentzian family member"),
    ("diag", 1, 1, -1, "Ricci-flat neutral family member"),
    ("diag", 1, -1, 1, "Ricci-flat neutral family member (other sign)"),
    ("diag", 2, 1, 1, "same family, p = 2"),
    ("const", 1, 1, 1, "constant curvature (Lorentzian)"),
    ("const", 1, 1, -1, "constant curvature (neutral: outside the table)"),
    ("nondiag", 1, 1, 1, "nilpotent curvature operator"),
]

for variant, p, pm, delta, label in CASES:
    bundle = report.analyze(ModelFamilyParams(variant, p, pm, delta))
    result = report.classification_of(bundle)
    pattern = report.eigen_pattern_of(bundle)
    print(f"{label}:")
    print(f"  variant={variant} p={p} sign={pm:+d} delta={delta:+d}"
          f"  pattern {bundle.data.signature()}")
    print(f"  -> {result.case}")
    print(f"     eigenvalue pattern: {pattern.pattern}"
          + (f", lambda = {pattern.lam:.3f}" if pattern.pattern == "cube_root_triple" else ""))
    for k, v in result.evidence:
        print(f"     {k}: {v}")
    print()
