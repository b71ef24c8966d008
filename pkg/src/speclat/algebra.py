"""Laurent-polynomial arithmetic in the N-th root variable and polynomial matrices.

All fractional powers of the spectral parameter z are carried as integer
powers of zeta with zeta**N == z, so "polynomial in z" is a checkable
predicate rather than a separate type.  Determinants come in two flavours:
fraction-free (Bareiss) elimination for exact-rational coefficients, and
evaluation at unit-circle nodes followed by inverse-DFT interpolation for
floating/dual coefficients.  Characteristic polynomials use the
Faddeev-LeVerrier trace recursion, whose divisions are exact over Q.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (DegenerateRoots, FloatingConditioning, NotPolynomialInZ)
from .scalars import Dual, is_exact, is_zero, magnitude, value


class LaurentPoly:
    """Sparse Laurent polynomial in zeta, with zeta**root_order == z.

    ``coeffs`` maps integer zeta exponents to scalar coefficients and never
    stores exact zeros.
    """

    __slots__ = ("root_order", "coeffs")

    def __init__(self, root_order, coeffs=None, clean=True):
        self.root_order = int(root_order)
        if coeffs is None:
            self.coeffs = {}
        elif clean:
            self.coeffs = {e: c for e, c in coeffs.items() if not is_zero(c)}
        else:
            self.coeffs = dict(coeffs)

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, root_order):
        return cls(root_order, {}, clean=False)

    @classmethod
    def term(cls, root_order, exp, coeff):
        if is_zero(coeff):
            return cls.zero(root_order)
        return cls(root_order, {int(exp): coeff}, clean=False)

    @classmethod
    def const(cls, root_order, coeff):
        return cls.term(root_order, 0, coeff)

    @classmethod
    def from_z_coeffs(cls, root_order, ascending):
        """Polynomial in z from coefficients [c0, c1, ...] of z**j."""
        n = int(root_order)
        return cls(n, {n * j: c for j, c in enumerate(ascending)})

    # -- inspection -------------------------------------------------------

    def is_zero(self):
        return not self.coeffs

    def min_exp(self):
        return min(self.coeffs) if self.coeffs else None

    def max_exp(self):
        return max(self.coeffs) if self.coeffs else None

    def is_polynomial_in_z(self):
        n = self.root_order
        return all(e >= 0 and e % n == 0 for e in self.coeffs)

    def z_degree(self):
        """Degree as a polynomial in z; -1 for the zero polynomial."""
        if not self.coeffs:
            return -1
        if not self.is_polynomial_in_z():
            raise NotPolynomialInZ(f"exponents {sorted(self.coeffs)}")
        return self.max_exp() // self.root_order

    def z_coefficient(self, j):
        """Coefficient of z**j (scalar 0 if absent)."""
        return self.coeffs.get(self.root_order * int(j), 0)

    def z_coeffs_ascending(self, degree=None):
        """Dense coefficient list [c0..c_deg] as a polynomial in z."""
        d = self.z_degree() if degree is None else int(degree)
        return [self.z_coefficient(j) for j in range(max(d, -1) + 1)]

    def max_abs(self):
        return max((magnitude(c) for c in self.coeffs.values()), default=0.0)

    # -- arithmetic -------------------------------------------------------

    def _check_ring(self, other):
        if self.root_order != other.root_order:
            raise ValueError("mixed root orders")

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.const(self.root_order, other)
        self._check_ring(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = out.get(e, 0) + c
            if is_zero(s):
                out.pop(e, None)
            else:
                out[e] = s
        return LaurentPoly(self.root_order, out, clean=False)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.root_order,
                           {e: -c for e, c in self.coeffs.items()}, clean=False)

    def __sub__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.const(self.root_order, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            if is_zero(other):
                return LaurentPoly.zero(self.root_order)
            return LaurentPoly(self.root_order,
                               {e: c * other for e, c in self.coeffs.items()})
        self._check_ring(other)
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                p = c1 * c2
                s = out.get(e)
                out[e] = p if s is None else s + p
        return LaurentPoly(self.root_order, out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return LaurentPoly(self.root_order,
                           {e: c / scalar for e, c in self.coeffs.items()})

    def __pow__(self, k):
        out = LaurentPoly.const(self.root_order, 1)
        for _ in range(int(k)):
            out = out * self
        return out

    def shift(self, k):
        """Multiply by zeta**k."""
        return LaurentPoly(self.root_order,
                           {e + k: c for e, c in self.coeffs.items()}, clean=False)

    def divexact(self, other):
        """Exact Laurent division (Bareiss support); remainder must vanish."""
        self._check_ring(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return LaurentPoly.zero(self.root_order)
        # shift both to ordinary polynomials
        sa, sb = self.min_exp(), other.min_exp()
        num = dict(self.shift(-sa).coeffs)
        den = other.shift(-sb).coeffs
        dlead = max(den)
        dc = den[dlead]
        quo = {}
        while num:
            nlead = max(num)
            if nlead < dlead:
                raise ArithmeticError("inexact polynomial division")
            qe = nlead - dlead
            qc = num[nlead] / dc
            quo[qe] = qc
            for e, c in den.items():
                t = e + qe
                s = num.get(t, 0) - qc * c
                if is_zero(s):
                    num.pop(t, None)
                else:
                    num[t] = s
        return LaurentPoly(self.root_order, quo).shift(sa - sb)

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.root_order == other.root_order and self.coeffs == other.coeffs

    def __hash__(self):
        raise TypeError("LaurentPoly is unhashable")

    def sub_small(self, tol):
        """Copy with coefficients below tol * max_abs dropped (floating cleanup)."""
        scale = self.max_abs()
        if scale == 0.0:
            return LaurentPoly.zero(self.root_order)
        return LaurentPoly(self.root_order,
                           {e: c for e, c in self.coeffs.items()
                            if magnitude(c) > tol * scale}, clean=False)

    # -- evaluation ---------------------------------------------------------

    def eval_zeta(self, zeta):
        out = 0
        for e, c in self.coeffs.items():
            out = out + c * zeta ** e
        return out

    def eval_z(self, z):
        """Evaluate as a polynomial in z (requires is_polynomial_in_z)."""
        n = self.root_order
        out = 0
        for e, c in self.coeffs.items():
            if e % n != 0 or e < 0:
                raise NotPolynomialInZ(f"exponent {e}")
            out = out + c * z ** (e // n)
        return out

    def __repr__(self):
        terms = " + ".join(f"({c})*zeta^{e}" for e, c in sorted(self.coeffs.items()))
        return f"LaurentPoly[{self.root_order}]({terms or '0'})"


class PolyMatrix:
    """Square matrix of LaurentPoly entries sharing one root order."""

    __slots__ = ("dim", "root_order", "entries")

    def __init__(self, entries, root_order=None):
        self.entries = [list(row) for row in entries]
        self.dim = len(self.entries)
        if root_order is None:
            root_order = self.entries[0][0].root_order
        self.root_order = root_order
        for row in self.entries:
            if len(row) != self.dim:
                raise ValueError("matrix must be square")
            for p in row:
                if p.root_order != root_order:
                    raise ValueError("mixed root orders in matrix")

    @classmethod
    def zeros(cls, dim, root_order):
        return cls([[LaurentPoly.zero(root_order) for _ in range(dim)]
                    for _ in range(dim)], root_order)

    @classmethod
    def identity(cls, dim, root_order, scalar=1):
        m = cls.zeros(dim, root_order)
        for i in range(dim):
            m.entries[i][i] = LaurentPoly.const(root_order, scalar)
        return m

    @classmethod
    def from_scalar_matrix(cls, mat, root_order):
        return cls([[LaurentPoly.const(root_order, c) for c in row] for row in mat],
                   root_order)

    def __getitem__(self, ij):
        return self.entries[ij[0]][ij[1]]

    def __matmul__(self, other):
        if isinstance(other, PolyMatrix):
            n = self.dim
            out = PolyMatrix.zeros(n, self.root_order)
            for i in range(n):
                row = self.entries[i]
                for j in range(n):
                    acc = LaurentPoly.zero(self.root_order)
                    for k in range(n):
                        if row[k].coeffs and other.entries[k][j].coeffs:
                            acc = acc + row[k] * other.entries[k][j]
                    out.entries[i][j] = acc
            return out
        return NotImplemented

    def __add__(self, other):
        return PolyMatrix([[a + b for a, b in zip(r1, r2)]
                           for r1, r2 in zip(self.entries, other.entries)],
                          self.root_order)

    def __sub__(self, other):
        return PolyMatrix([[a - b for a, b in zip(r1, r2)]
                           for r1, r2 in zip(self.entries, other.entries)],
                          self.root_order)

    def scale(self, s):
        return PolyMatrix([[p * s for p in row] for row in self.entries],
                          self.root_order)

    def transpose(self):
        return PolyMatrix([[self.entries[j][i] for j in range(self.dim)]
                           for i in range(self.dim)], self.root_order)

    def left_mul(self, mat):
        """scalar-matrix @ self."""
        n = self.dim
        out = PolyMatrix.zeros(n, self.root_order)
        for i in range(n):
            for j in range(n):
                acc = LaurentPoly.zero(self.root_order)
                for k in range(n):
                    c = mat[i][k]
                    if not is_zero(c) and self.entries[k][j].coeffs:
                        acc = acc + self.entries[k][j] * c
                out.entries[i][j] = acc
        return out

    def right_mul(self, mat):
        """self @ scalar-matrix."""
        n = self.dim
        out = PolyMatrix.zeros(n, self.root_order)
        for i in range(n):
            for j in range(n):
                acc = LaurentPoly.zero(self.root_order)
                for k in range(n):
                    c = mat[k][j]
                    if not is_zero(c) and self.entries[i][k].coeffs:
                        acc = acc + self.entries[i][k] * c
                out.entries[i][j] = acc
        return out

    def eval_zeta(self, zeta):
        return [[p.eval_zeta(zeta) for p in row] for row in self.entries]

    def eval_z(self, z):
        return [[p.eval_z(z) for p in row] for row in self.entries]

    def z_coefficient_matrix(self, j):
        return [[p.z_coefficient(j) for p in row] for row in self.entries]

    def is_polynomial_in_z(self):
        return all(p.is_polynomial_in_z() for row in self.entries for p in row)

    def max_z_degree(self):
        return max(p.z_degree() for row in self.entries for p in row)

    def max_abs(self):
        return max(p.max_abs() for row in self.entries for p in row)

    def trace(self):
        acc = LaurentPoly.zero(self.root_order)
        for i in range(self.dim):
            acc = acc + self.entries[i][i]
        return acc

    def map(self, fn):
        return PolyMatrix([[fn(p) for p in row] for row in self.entries],
                          self.root_order)

    def is_exact(self):
        return all(is_exact(c) for row in self.entries for p in row
                   for c in p.coeffs.values())


# -- scalar (numeric) linear algebra, generic over the coefficient types ----

def scalar_det(mat):
    """Determinant of a small matrix of scalars via pivoted elimination.

    Division-based, so exact for Fractions and correct for Duals.
    """
    n = len(mat)
    a = [list(row) for row in mat]
    det = 1
    sign = 1
    for k in range(n):
        piv = max(range(k, n), key=lambda r: magnitude(a[r][k]))
        if magnitude(a[piv][k]) == 0.0:
            return 0 * det
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        pivval = a[k][k]
        det = det * pivval
        for i in range(k + 1, n):
            f = a[i][k] / pivval
            for j in range(k + 1, n):
                a[i][j] = a[i][j] - f * a[k][j]
    return sign * det


def scalar_inv(mat):
    """Inverse of a small scalar matrix via Gauss-Jordan with pivoting."""
    n = len(mat)
    a = [list(row) for row in mat]
    one = a[0][0] ** 0 if isinstance(a[0][0], Dual) else 1
    inv = [[one * (1 if i == j else 0) for j in range(n)] for i in range(n)]
    for k in range(n):
        piv = max(range(k, n), key=lambda r: magnitude(a[r][k]))
        if magnitude(a[piv][k]) == 0.0:
            raise ZeroDivisionError("singular matrix")
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            inv[k], inv[piv] = inv[piv], inv[k]
        p = a[k][k]
        a[k] = [x / p for x in a[k]]
        inv[k] = [x / p for x in inv[k]]
        for i in range(n):
            if i == k:
                continue
            f = a[i][k]
            if is_zero(f):
                continue
            a[i] = [x - f * y for x, y in zip(a[i], a[k])]
            inv[i] = [x - f * y for x, y in zip(inv[i], inv[k])]
    return inv


def mat_mul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    return [[sum(a[i][k] * b[k][j] for k in range(m)) for j in range(p)]
            for i in range(n)]


def vec_mat(v, m):
    n = len(m)
    return [sum(v[k] * m[k][j] for k in range(n)) for j in range(len(m[0]))]


# -- determinants over the Laurent ring --------------------------------------

def det_bareiss(m):
    """Fraction-free (Bareiss) determinant; exact over rational coefficients."""
    n = m.dim
    if n == 1:
        return m.entries[0][0]
    a = [[p for p in row] for row in m.entries]
    sign = 1
    prev = LaurentPoly.const(m.root_order, 1)
    for k in range(n - 1):
        if a[k][k].is_zero():
            piv = next((r for r in range(k + 1, n) if not a[r][k].is_zero()), None)
            if piv is None:
                return LaurentPoly.zero(m.root_order)
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[k][k] * a[i][j] - a[i][k] * a[k][j]
                a[i][j] = num.divexact(prev)
            a[i][k] = LaurentPoly.zero(m.root_order)
        prev = a[k][k]
    out = a[n - 1][n - 1]
    return -out if sign < 0 else out


def det_interp(m, radius=1.0, cond_bound=1e12, drop_tol=1e-13):
    """Evaluation-interpolation determinant for floating/dual coefficients.

    The exponent window is bounded by row/column degree sums; nodes are
    radius * (roots of unity), giving a perfectly conditioned DFT system at
    radius 1.
    """
    n = m.dim
    root_order = m.root_order

    def exp_bounds(lines):
        lo = hi = 0
        for line in lines:
            exps = [p for p in line if not p.is_zero()]
            if not exps:
                return None
            lo += min(p.min_exp() for p in exps)
            hi += max(p.max_exp() for p in exps)
        return lo, hi

    rows = exp_bounds(m.entries)
    cols = exp_bounds([[m.entries[i][j] for i in range(n)] for j in range(n)])
    if rows is None or cols is None:
        return LaurentPoly.zero(root_order)
    lo = max(rows[0], cols[0])
    hi = min(rows[1], cols[1])
    if hi < lo:
        return LaurentPoly.zero(root_order)
    width = hi - lo + 1

    cond = max(radius, 1.0 / radius) ** (width - 1)
    if cond > cond_bound:
        raise FloatingConditioning(
            f"window {width}, radius {radius}: condition estimate {cond:.3g}")

    nodes = [radius * np.exp(2j * np.pi * s / width) for s in range(width)]
    vals = [scalar_det(m.eval_zeta(zeta)) for zeta in nodes]
    # strip the zeta**lo prefactor, then inverse DFT
    shifted = [v * (zeta ** (-lo)) for v, zeta in zip(vals, nodes)]
    coeffs = {}
    for t in range(width):
        acc = 0
        for s in range(width):
            acc = acc + shifted[s] * np.exp(-2j * np.pi * s * t / width)
        c = acc * (1.0 / (width * radius ** t))
        coeffs[lo + t] = c
    out = LaurentPoly(root_order, coeffs)
    return out.sub_small(drop_tol)


def det(m, radius=1.0, cond_bound=1e12):
    """Exact determinant of a PolyMatrix; algorithm chosen by scalar mode."""
    if m.is_exact():
        return det_bareiss(m)
    return det_interp(m, radius=radius, cond_bound=cond_bound)


def det_cofactor(m):
    """Cofactor-expansion determinant (independent test oracle only)."""
    n = m.dim
    if n == 1:
        return m.entries[0][0]
    acc = LaurentPoly.zero(m.root_order)
    for j in range(n):
        if m.entries[0][j].is_zero():
            continue
        minor = PolyMatrix([[m.entries[i][k] for k in range(n) if k != j]
                            for i in range(1, n)], m.root_order)
        term = m.entries[0][j] * det_cofactor(minor)
        acc = acc + (term if j % 2 == 0 else -term)
    return acc


# -- spectral curves ----------------------------------------------------------

@dataclass(frozen=True)
class SpectralCurve:
    """Coefficients of Det(w Id - m(z)) = sum_k (-1)^k f_k(z) w^(N-k), f_0 = 1.

    fc[k-1][j] is f_k^(j), the coefficient of z^(k*M - j); deg f_k <= k*M by
    construction.  genus is (N-1)(M*N-2)/2 when that is nonnegative.
    """

    N: int
    M: int
    fc: tuple

    @property
    def genus(self):
        return max((self.N - 1) * (self.M * self.N - 2) // 2, 0)

    def f_coeff(self, k, j):
        return self.fc[k - 1][j]

    def f_ascending(self, k):
        """f_k as [c0, c1, ...] in ascending powers of z."""
        row = self.fc[k - 1]
        return list(reversed(row))

    def f_eval(self, k, z):
        acc = 0
        for c in self.fc[k - 1]:
            acc = acc * z + c
        return acc

    def F_eval(self, z, w):
        acc = w ** self.N
        sign = -1
        for k in range(1, self.N + 1):
            acc = acc + sign * self.f_eval(k, z) * w ** (self.N - k)
            sign = -sign
        return acc

    def dFdw_eval(self, z, w):
        acc = self.N * w ** (self.N - 1)
        sign = -1
        for k in range(1, self.N):
            acc = acc + sign * (self.N - k) * self.f_eval(k, z) * w ** (self.N - k - 1)
            sign = -sign
        return acc

    def hamiltonian_labels(self):
        """(k, j) labels of the nontrivial integrals, k ascending then j."""
        out = []
        for k in range(1, self.N):
            for j in range(1, k * self.M):
                out.append((k, j))
        return out

    def hamiltonian_values(self):
        return [self.f_coeff(k, j) for k, j in self.hamiltonian_labels()]


def char_poly(m, M=None):
    """Characteristic-polynomial coefficients via the Faddeev-LeVerrier recursion.

    Every entry of ``m`` must be a polynomial in z.  Returns the SpectralCurve
    with f_k stored by the f_k^(j) convention.
    """
    if not m.is_polynomial_in_z():
        raise NotPolynomialInZ("matrix entries must be polynomials in z")
    n = m.dim
    if M is None:
        M = max(m.max_z_degree(), 0)
    elif m.max_z_degree() > M:
        raise ValueError("entry degree exceeds declared M")

    b = PolyMatrix.identity(n, m.root_order)
    fs = []
    for k in range(1, n + 1):
        c = m @ b
        # a_k = -tr(C_k)/k; dividing a Fraction by an int stays exact
        a_k = c.trace() / (-k)
        f_k = a_k if k % 2 == 0 else -a_k  # f_k = (-1)^k a_k
        fs.append(f_k)
        if k < n:
            b = c + PolyMatrix.identity(n, m.root_order, scalar=1).scale(a_k)
    fc = []
    for k, f in enumerate(fs, start=1):
        deg = k * M
        if not f.is_polynomial_in_z():
            raise NotPolynomialInZ(f"f_{k} not polynomial in z")
        if f.z_degree() > deg:
            raise ValueError(f"deg f_{k} = {f.z_degree()} exceeds {deg}")
        fc.append(tuple(f.z_coefficient(deg - j) for j in range(deg + 1)))
    return SpectralCurve(N=n, M=M, fc=tuple(fc))


# -- dense z-polynomial helpers (coefficient lists, ascending powers) --------

def zp_eval(coeffs, z):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def zp_derivative(coeffs):
    return [j * c for j, c in enumerate(coeffs)][1:] or [0 * coeffs[0]]


def zp_degree(coeffs, tol=0.0):
    scale = max((magnitude(c) for c in coeffs), default=0.0)
    for j in range(len(coeffs) - 1, -1, -1):
        if magnitude(coeffs[j]) > tol * scale:
            return j
    return -1


# -- root finding -------------------------------------------------------------

def roots(coeffs, tol=1e-9, simple=False, polish_iters=4):
    """All complex roots of a z-polynomial given by ascending coefficients.

    Companion-matrix eigenvalues followed by Newton polishing; output sorted
    by (real, imag).  Each root carries a multiplicity flag, set when two
    polished roots sit closer than tol * (1 + |root|).
    """
    cs = [complex(value(c)) for c in coeffs]
    while len(cs) > 1 and cs[-1] == 0:
        cs.pop()
    deg = len(cs) - 1
    if deg < 1:
        raise ValueError("degree must be at least 1")
    if cs[-1] == 0:
        raise ValueError("leading coefficient vanishes")
    monic = [c / cs[-1] for c in cs]
    comp = np.zeros((deg, deg), dtype=complex)
    if deg > 1:
        comp[1:, :-1] = np.eye(deg - 1)
    comp[:, -1] = [-monic[j] for j in range(deg)]
    vals = np.linalg.eigvals(comp)

    dcs = zp_derivative(monic)
    polished = []
    for r in vals:
        x = complex(r)
        for _ in range(polish_iters):
            p = zp_eval(monic, x)
            dp = zp_eval(dcs, x)
            if abs(dp) < 1e-300:
                break
            step = p / dp
            if not np.isfinite(step.real) or not np.isfinite(step.imag):
                break
            x -= step
            if abs(step) < 1e-16 * (1 + abs(x)):
                break
        polished.append(x)

    polished.sort(key=lambda c: (c.real, c.imag))
    flags = [False] * deg
    for i in range(deg):
        for j in range(deg):
            if i != j and abs(polished[i] - polished[j]) < tol * (1 + abs(polished[i])):
                flags[i] = True
    if simple and any(flags):
        raise DegenerateRoots(f"multiple roots within tol={tol}")
    return list(zip(polished, flags))
