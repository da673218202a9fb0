"""Shared fixtures: the model parameter grid and cached analysis bundles."""

from __future__ import annotations

from fractions import Fraction

import pytest

from curvhom4 import report
from curvhom4.models import ModelFamilyParams

# (variant, p, pm_sign, delta); the (-, -1) combination is excluded because
# its sign pattern ---+ is not one of the admissible three.
DIAG_GRID = [
    ("diag", Fraction(p), pm, d)
    for p in ("1/2", "1", "2")
    for (pm, d) in ((1, 1), (1, -1), (-1, 1))
]
NONDIAG_GRID = [("nondiag", Fraction(1), pm, d) for (pm, d) in ((1, 1), (1, -1), (-1, 1))]
FULL_GRID = DIAG_GRID + NONDIAG_GRID

_CACHE = {}


def get_bundle(variant, p=Fraction(1), pm_sign=1, delta=1, orientation=1):
    key = (variant, Fraction(p), pm_sign, delta, orientation)
    if key not in _CACHE:
        params = ModelFamilyParams(variant, Fraction(p), pm_sign, delta)
        _CACHE[key] = report.analyze(params, orientation=orientation)
    return _CACHE[key]


@pytest.fixture
def lorentz_bundle():
    return get_bundle("diag", Fraction(1), 1, 1)


@pytest.fixture
def neutral_bundle():
    return get_bundle("diag", Fraction(1), 1, -1)


@pytest.fixture
def const_bundle():
    return get_bundle("const", Fraction(1), 1, 1)


@pytest.fixture
def nondiag_bundle():
    return get_bundle("nondiag", Fraction(1), 1, 1)
