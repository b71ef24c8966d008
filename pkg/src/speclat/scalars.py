"""Scalar substrate: exact rationals, complex doubles and dual-extended values.

Plain Python ``Fraction``/``int`` carry the exact-rational mode, ``float``/
``complex`` the floating mode.  :class:`Dual` augments a value with a vector
of first derivatives with respect to a declared list of coordinates; all
arithmetic propagates the derivatives by the product/quotient rules, which is
what the Poisson-bracket engine differentiates through.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import NeedsFloating

RATIONAL_TYPES = (int, Fraction)


class Dual:
    """A value together with first derivatives along seeded directions.

    ``grad`` is a fixed-width numpy vector (complex128 in floating mode,
    object dtype holding Fractions in exact mode).  Zero-seed duals behave
    exactly like their plain value.
    """

    __slots__ = ("val", "grad")

    def __init__(self, val, grad):
        self.val = val
        self.grad = grad

    @classmethod
    def seeded(cls, val, slot, width, scale=1.0, exact=False):
        if exact:
            grad = np.full(width, Fraction(0), dtype=object)
            grad[slot] = Fraction(scale) if not isinstance(scale, Fraction) else scale
        else:
            grad = np.zeros(width, dtype=complex)
            grad[slot] = complex(scale)
        return cls(val, grad)

    @classmethod
    def constant(cls, val, width, exact=False):
        if exact:
            return cls(val, np.full(width, Fraction(0), dtype=object))
        return cls(val, np.zeros(width, dtype=complex))

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val + other.val, self.grad + other.grad)
        return Dual(self.val + other, self.grad)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val - other.val, self.grad - other.grad)
        return Dual(self.val - other, self.grad)

    def __rsub__(self, other):
        return Dual(other - self.val, -self.grad)

    def __neg__(self):
        return Dual(-self.val, -self.grad)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val * other.val,
                        self.val * other.grad + other.val * self.grad)
        return Dual(self.val * other, self.grad * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            v = self.val / other.val
            return Dual(v, (self.grad - v * other.grad) / other.val)
        return Dual(self.val / other, self.grad / other)

    def __rtruediv__(self, other):
        v = other / self.val
        return Dual(v, -v * self.grad / self.val)

    def __pow__(self, k):
        if isinstance(k, int):
            if k == 0:
                return Dual(self.val ** 0, 0 * self.grad)
            return Dual(self.val ** k, k * self.val ** (k - 1) * self.grad)
        a = float(k)
        v = _principal_pow(self.val, a)
        return Dual(v, a * _principal_pow(self.val, a - 1.0) * self.grad)

    def __eq__(self, other):
        if isinstance(other, Dual):
            return self.val == other.val and np.array_equal(self.grad, other.grad)
        return self.val == other and not np.any(self.grad != 0)

    def __hash__(self):
        raise TypeError("Dual is unhashable")

    def __repr__(self):
        return f"Dual({self.val!r}, |grad|={np.max(np.abs(self.grad.astype(complex))):.3g})"


def _principal_pow(x, a):
    """x**a for positive real (or complex) x with a float exponent."""
    if isinstance(x, RATIONAL_TYPES):
        x = float(x)
    return x ** a


def value(x):
    """Strip the derivative part; plain scalars pass through."""
    return x.val if isinstance(x, Dual) else x


def grad(x, width=None, exact=False):
    """Derivative vector of ``x``; zeros for a plain scalar (needs width)."""
    if isinstance(x, Dual):
        return x.grad
    if width is None:
        raise ValueError("width required for plain scalars")
    if exact:
        return np.full(width, Fraction(0), dtype=object)
    return np.zeros(width, dtype=complex)


def is_zero(x):
    if isinstance(x, Dual):
        return x.val == 0 and not np.any(x.grad != 0)
    return x == 0


def magnitude(x):
    """|value| as a float, for pivoting and tolerance tests."""
    v = value(x)
    if isinstance(v, Fraction):
        return abs(float(v))
    return abs(complex(v))


def is_exact(x):
    """True when ``x`` carries no floating content (pure rational)."""
    if isinstance(x, Dual):
        return isinstance(x.val, RATIONAL_TYPES) and x.grad.dtype == object
    return isinstance(x, RATIONAL_TYPES)


def _int_nth_root(n, k):
    """Floor k-th root of a nonnegative int, plus exactness flag."""
    if n == 0:
        return 0, True
    r = round(n ** (1.0 / k))
    while r ** k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r, r ** k == n


def exact_nth_root(q, k):
    """Fraction k-th root when q is a perfect k-th power, else None."""
    q = Fraction(q)
    if q < 0:
        return None
    rn, okn = _int_nth_root(q.numerator, k)
    rd, okd = _int_nth_root(q.denominator, k)
    if okn and okd:
        return Fraction(rn, rd)
    return None


def nth_root(x, k, allow_float=True):
    """Principal k-th root of a positive scalar.

    Rational inputs return a Fraction when the root is exact; otherwise a
    float if ``allow_float`` else NeedsFloating.  Duals differentiate the
    power rule.
    """
    if isinstance(x, Dual):
        return x ** Fraction(1, k)
    if isinstance(x, RATIONAL_TYPES):
        r = exact_nth_root(x, k)
        if r is not None:
            return r
        if not allow_float:
            raise NeedsFloating(f"{x} has no exact {k}-th root")
        return float(x) ** (1.0 / k)
    return x ** (1.0 / k)
