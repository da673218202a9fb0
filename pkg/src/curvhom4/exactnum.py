"""Exact arithmetic in the real quadratic field Q(sqrt 3) and its complexification.

All data of the cube-root model families (the rotation by 120 degrees, its
powers, the standard inner products) lives in Q(sqrt 3) once the family
parameter p is rational, so curvature identities can be checked with no
rounding at all.  Elements are stored as a + b*sqrt(3) with a, b rational.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

_SQRT3 = math.sqrt(3.0)


def _coerce(x):
    if isinstance(x, QRoot3):
        return x
    if isinstance(x, (int, Fraction)):
        return QRoot3(x, 0)
    return None


class QRoot3:
    """An element a + b*sqrt(3) of Q(sqrt 3), with exact rational a, b."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @classmethod
    def sqrt3(cls) -> "QRoot3":
        return cls(0, 1)

    def __repr__(self):
        if self.b == 0:
            return f"QRoot3({self.a})"
        return f"QRoot3({self.a}, {self.b})"

    def __hash__(self):
        return hash((self.a, self.b))

    def __eq__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def __float__(self):
        return float(self.a) + float(self.b) * _SQRT3

    def __abs__(self):
        return abs(float(self))

    def __neg__(self):
        return QRoot3(-self.a, -self.b)

    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return QRoot3(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return QRoot3(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return QRoot3(self.a * o.a + 3 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conj(self) -> "QRoot3":
        """Galois conjugate a - b*sqrt(3)."""
        return QRoot3(self.a, -self.b)

    def inverse(self) -> "QRoot3":
        n = self.a * self.a - 3 * self.b * self.b
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt3)")
        return QRoot3(self.a / n, -self.b / n)

    def __truediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = QRoot3(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def sign(self) -> int:
        """Exact sign, using (a + b*sqrt3) ~ sign comparison of a^2 vs 3 b^2."""
        if self.a == 0 and self.b == 0:
            return 0
        if self.a >= 0 and self.b >= 0:
            return 1
        if self.a <= 0 and self.b <= 0:
            return -1
        # Opposite signs: compare |a| against |b| sqrt(3) exactly.
        if self.a > 0:  # b < 0
            return 1 if self.a * self.a > 3 * self.b * self.b else -1
        return -1 if self.a * self.a > 3 * self.b * self.b else 1


class CRoot3:
    """An element of Q(sqrt 3, i): re + i*im with re, im in Q(sqrt 3).

    Contains q = exp(2*pi*i/3) = (-1 + i sqrt 3)/2, so the whole complexified
    eigen-apparatus of the cube-root families is exact here.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, QRoot3) else QRoot3(re)
        self.im = im if isinstance(im, QRoot3) else QRoot3(im)

    @classmethod
    def omega(cls) -> "CRoot3":
        """The primitive cube root of unity (-1 + i sqrt3)/2."""
        return cls(QRoot3(Fraction(-1, 2)), QRoot3(0, Fraction(1, 2)))

    @classmethod
    def i(cls) -> "CRoot3":
        return cls(QRoot3(0), QRoot3(1))

    def __repr__(self):
        return f"CRoot3({self.re!r}, {self.im!r})"

    def __hash__(self):
        return hash((self.re, self.im))

    def _coerce(self, x):
        if isinstance(x, CRoot3):
            return x
        if isinstance(x, (int, Fraction, QRoot3)):
            return CRoot3(x, 0)
        return None

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def __neg__(self):
        return CRoot3(-self.re, -self.im)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CRoot3(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CRoot3(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CRoot3(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conj(self) -> "CRoot3":
        return CRoot3(self.re, -self.im)

    def inverse(self) -> "CRoot3":
        n = self.re * self.re + self.im * self.im
        if n.is_zero():
            raise ZeroDivisionError("division by zero in Q(sqrt3, i)")
        return CRoot3(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = CRoot3(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out


def exact_matrix(rows) -> np.ndarray:
    """Object-dtype matrix with entries coerced into QRoot3/CRoot3/Fraction."""
    rows = list(rows)
    m = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            if isinstance(x, (QRoot3, CRoot3)):
                m[i, j] = x
            else:
                m[i, j] = QRoot3(x)
    return m


def to_float_matrix(m: np.ndarray) -> np.ndarray:
    """Convert an object matrix of QRoot3/CRoot3 to float64/complex128."""
    flat = [x for x in np.asarray(m).ravel()]
    if any(isinstance(x, CRoot3) for x in flat):
        return np.array([[complex(x) for x in row] for row in m], dtype=complex)
    return np.array([[float(x) for x in row] for row in m], dtype=float)


def zeros_like_field(sample, shape) -> np.ndarray:
    """Zero-filled object array whose zero matches the field of ``sample``."""
    zero = sample * 0
    out = np.empty(shape, dtype=object)
    out[...] = zero
    return out


def gauss_inverse(mat: np.ndarray) -> np.ndarray:
    """Field-generic matrix inverse by Gauss-Jordan with partial pivoting.

    Works for object arrays over any field whose elements support
    +, -, *, /, abs() and truthiness; pivots are chosen by float magnitude.
    """
    n = mat.shape[0]
    if mat.shape != (n, n):
        raise ValueError("square matrix required")
    a = np.array(mat, dtype=object, copy=True)
    one = a[0, 0] * 0 + 1
    eye = zeros_like_field(a[0, 0], (n, n))
    for i in range(n):
        eye[i, i] = one
    inv = eye
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r, col]))
        if not a[piv, col]:
            raise ZeroDivisionError("singular matrix")
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            inv[[col, piv]] = inv[[piv, col]]
        d = a[col, col]
        for j in range(n):
            a[col, j] = a[col, j] / d
            inv[col, j] = inv[col, j] / d
        for r in range(n):
            if r == col:
                continue
            f = a[r, col]
            if not f:
                continue
            for j in range(n):
                a[r, j] = a[r, j] - f * a[col, j]
                inv[r, j] = inv[r, j] - f * inv[col, j]
    return inv


def exact_nullspace(mat: np.ndarray) -> list:
    """Basis of the kernel of an object-dtype matrix over its field.

    Returns a list of object-dtype vectors; exact row reduction, pivoting by
    float magnitude for stability of the (exact) elimination order.
    """
    m, n = mat.shape
    a = np.array(mat, dtype=object, copy=True)
    pivots = []
    row = 0
    for col in range(n):
        if row >= m:
            break
        piv = max(range(row, m), key=lambda r: abs(a[r, col]))
        if not a[piv, col]:
            continue
        if piv != row:
            a[[row, piv]] = a[[piv, row]]
        d = a[row, col]
        for j in range(n):
            a[row, j] = a[row, j] / d
        for r in range(m):
            if r != row and a[r, col]:
                f = a[r, col]
                for j in range(n):
                    a[r, j] = a[r, j] - f * a[row, j]
        pivots.append(col)
        row += 1
    free = [c for c in range(n) if c not in pivots]
    zero = mat[0, 0] * 0
    one = zero + 1
    basis = []
    for fc in free:
        v = np.empty(n, dtype=object)
        v[...] = zero
        v[fc] = one
        for r, pc in enumerate(pivots):
            v[pc] = -a[r, fc]
        basis.append(v)
    return basis


def fraction_cube_root(x: Fraction):
    """Exact cube root of a rational number, or None if it is not a cube."""
    x = Fraction(x)

    def icbrt(k: int):
        if k < 0:
            r = icbrt(-k)
            return None if r is None else -r
        r = round(k ** (1.0 / 3.0)) if k else 0
        for c in (r - 1, r, r + 1):
            if c >= 0 and c * c * c == k:
                return c
        return None

    num = icbrt(x.numerator)
    den = icbrt(x.denominator)
    if num is None or den is None:
        return None
    return Fraction(num, den)
