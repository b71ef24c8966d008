"""Local Lax matrices, the gauge matrix Omega_n, monodromies and spectral curves.

The two monodromy matrices are the ordered products over sites L..1 (site 1
is the rightmost factor).  After the product every zeta exponent collapses to
a nonnegative multiple of N; that collapse, the block degree structure and
det = 1 are asserted at construction time, exactly in rational mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import (LaurentPoly, PolyMatrix, char_poly, det, mat_mul,
                      scalar_inv)
from .errors import CollapseFailure, NeedsFloating
from .lattice import CanonicalState, LatticeConfig, v_from_canonical
from .scalars import Dual, is_exact, magnitude, nth_root, value

T_KIND = "T"
TBAR_KIND = "Tbar"


def lax_tilde(v_n, N):
    """V-variable Lax matrix: V^(-1/N) (zeta E11 + (-1)^(N-1) V E1N + subdiag)."""
    if isinstance(v_n, (int, Fraction)):
        pref = nth_root(Fraction(1, 1) / Fraction(v_n), N, allow_float=False)
    else:
        pref = 1 / nth_root(v_n, N)
    m = PolyMatrix.zeros(N, N)
    m.entries[0][0] = LaurentPoly.term(N, 1, pref)
    sign = 1 if (N - 1) % 2 == 0 else -1
    m.entries[0][N - 1] = LaurentPoly.const(N, sign * v_n * pref)
    for k in range(1, N):
        m.entries[k][k - 1] = LaurentPoly.const(N, pref)
    return m


def lax_local(P_n, Q_n, N):
    """Canonical-variable local Lax matrix; exact-rational capable, det = 1."""
    m = PolyMatrix.zeros(N, N)
    sign = 1 if (N - 1) % 2 == 0 else -1
    m.entries[0][0] = LaurentPoly.term(N, 1, P_n)
    m.entries[0][1] = LaurentPoly.term(N, 1, Q_n)
    m.entries[N - 1][0] = LaurentPoly.term(N, 1 - N, sign / Q_n if not isinstance(Q_n, int)
                                           else Fraction(sign, Q_n))
    for k in range(2, N):
        m.entries[k - 1][k] = LaurentPoly.term(N, 1, 1)
    return m


def lax_bar(P_n, Q_n, N):
    """Transposed inverse of lax_local, written out entrywise."""
    m = PolyMatrix.zeros(N, N)
    sign = 1 if (N - 1) % 2 == 0 else -1
    m.entries[0][1] = LaurentPoly.term(N, -1, 1 / Q_n if not isinstance(Q_n, int)
                                       else Fraction(1, Q_n))
    for k in range(2, N):
        m.entries[k - 1][k] = LaurentPoly.term(N, -1, 1)
    m.entries[N - 1][0] = LaurentPoly.term(N, N - 1, sign * Q_n)
    m.entries[N - 1][1] = LaurentPoly.term(N, N - 1, -sign * P_n)
    return m


def poly_inverse_unit_det(m):
    """Inverse of a PolyMatrix with determinant 1, via the adjugate."""
    n = m.dim
    from .algebra import det_cofactor
    adj = PolyMatrix.zeros(n, m.root_order)
    for i in range(n):
        for j in range(n):
            minor = PolyMatrix([[m.entries[r][c] for c in range(n) if c != j]
                                for r in range(n) if r != i], m.root_order)
            cof = det_cofactor(minor) if n > 1 else LaurentPoly.const(m.root_order, 1)
            adj.entries[j][i] = cof if (i + j) % 2 == 0 else -cof
    return adj


# -- the Appendix-A gauge matrix ----------------------------------------------

def _pow_frac(x, fr):
    """x**Fraction for positive x; exact when the root is exact."""
    fr = Fraction(fr)
    if fr.denominator == 1:
        return x ** fr.numerator
    if isinstance(x, Dual):
        return x ** fr
    root = nth_root(x, fr.denominator)
    return root ** fr.numerator


def _flip_shear(N):
    """A = (antidiagonal flip) @ (Id - upper shift), exact integer entries."""
    J = [[Fraction(1) if j == N - 1 - i else Fraction(0) for j in range(N)]
         for i in range(N)]
    IU = [[Fraction(1) if j == i else (Fraction(-1) if j == i + 1 else Fraction(0))
           for j in range(N)] for i in range(N)]
    return mat_mul(J, IU)


def _omega_diag(s, n):
    """Diagonal of B_n: products of P, Q at sites n..n+N-2 with D^(j) exponents."""
    N = s.config.N
    diag = []
    for i in range(1, N + 1):
        acc = 1
        for k in range(N - 1):
            ep = Fraction(-(N - k - 1), N) + (1 if i >= k + 2 else 0)
            eq = Fraction(1, N) - (1 if i == k + 2 else 0)
            acc = acc * _pow_frac(s.p(n + k), ep) * _pow_frac(s.q(n + k), eq)
        diag.append(acc)
    return diag


def omega(s, n):
    """Gauge matrix Omega_n = B_n A X(zeta) as a PolyMatrix in zeta."""
    N = s.config.N
    diag = _omega_diag(s, n)
    A = _flip_shear(N)
    BnA = [[diag[i] * A[i][j] for j in range(N)] for i in range(N)]
    m = PolyMatrix.zeros(N, N)
    for i in range(N):
        for j in range(N):
            m.entries[i][j] = LaurentPoly.term(N, j, BnA[i][j])
    return m


def omega_inv(s, n):
    """X(zeta)^(-1) A^(-1) B_n^(-1), assembled from the exact factors."""
    N = s.config.N
    diag = _omega_diag(s, n)
    Ainv = scalar_inv(_flip_shear(N))
    AiBi = [[Ainv[i][j] / diag[j] for j in range(N)] for i in range(N)]
    m = PolyMatrix.zeros(N, N)
    for i in range(N):
        for j in range(N):
            m.entries[i][j] = LaurentPoly.term(N, -i, AiBi[i][j])
    return m


# -- monodromy ----------------------------------------------------------------

@dataclass(frozen=True)
class Monodromy:
    kind: str
    matrix: PolyMatrix
    config: LatticeConfig


def _collapse(mat, cfg, kind, tol):
    """Check zeta exponents are nonnegative multiples of N; drop float dust."""
    N = cfg.N
    scale = max(mat.max_abs(), 1.0)
    exact = mat.is_exact()
    out = PolyMatrix.zeros(mat.dim, mat.root_order)
    for i in range(mat.dim):
        for j in range(mat.dim):
            kept = {}
            for e, c in mat.entries[i][j].coeffs.items():
                if e >= 0 and e % N == 0:
                    kept[e] = c
                elif exact or magnitude(c) > tol * scale:
                    raise CollapseFailure(
                        f"{kind} entry ({i+1},{j+1}) kept zeta^{e} "
                        f"with |coeff| = {magnitude(c):.3g}")
            out.entries[i][j] = LaurentPoly(mat.root_order, kept, clean=False)
    return out


def _structure_errors(mat, cfg, kind, tol):
    """Violations of the block degree structure of T or Tbar."""
    M, N = cfg.M, cfg.N
    scale = max(mat.max_abs(), 1.0)
    exact = mat.is_exact()

    def cleaned(p):
        if exact:
            return p
        return LaurentPoly(p.root_order,
                           {e: c for e, c in p.coeffs.items()
                            if magnitude(c) > tol * scale}, clean=False)

    if kind == TBAR_KIND:
        diag_deg, corner_deg, off_deg = M, M - 1, M - 1
    else:
        diag_deg, corner_deg, off_deg = M * (N - 1), M * (N - 1) - 1, M * (N - 1) - 1

    errs = []
    for i in range(N):
        for j in range(N):
            p = cleaned(mat.entries[i][j])
            d = p.z_degree()
            if i == j:
                want = corner_deg if i == 0 else diag_deg
                if d != want:
                    errs.append(f"({i+1},{j+1}) degree {d} != {want}")
            elif (i > j) == (kind == TBAR_KIND):
                # the z-divisible triangle: lower for Tbar, upper for T
                if not (p.is_zero() or magnitude(p.z_coefficient(0)) <= tol * scale):
                    errs.append(f"({i+1},{j+1}) has a constant term")
                if d > off_deg + 1:
                    errs.append(f"({i+1},{j+1}) degree {d} > {off_deg + 1}")
            else:
                if d > off_deg:
                    errs.append(f"({i+1},{j+1}) degree {d} > {off_deg}")
    return errs


def monodromy(s, kind=TBAR_KIND, validate=True, tol=1e-11):
    """Ordered product of the local Lax matrices, site L leftmost.

    Asserts the polynomial collapse, the degree structure of the kind, and
    (for Tbar) unit determinant; all exact in rational mode.
    """
    cfg = s.config
    local = lax_bar if kind == TBAR_KIND else lax_local
    mat = local(s.p(cfg.L), s.q(cfg.L), cfg.N)
    for n in range(cfg.L - 1, 0, -1):
        mat = mat @ local(s.p(n), s.q(n), cfg.N)
    mat = _collapse(mat, cfg, kind, tol)
    if validate:
        errs = _structure_errors(mat, cfg, kind, tol)
        if errs:
            raise CollapseFailure(f"{kind} degree structure violated: " + "; ".join(errs))
        if kind == TBAR_KIND:
            d = det(mat)
            one = d - LaurentPoly.const(mat.root_order, 1)
            if mat.is_exact():
                if not one.is_zero():
                    raise CollapseFailure(f"det Tbar != 1: {d!r}")
            elif one.max_abs() > tol * max(mat.max_abs(), 1.0) * 100:
                raise CollapseFailure(f"det Tbar - 1 = {one.max_abs():.3g}")
    return Monodromy(kind=kind, matrix=mat, config=cfg)


def structure_report(s, tol=1e-11):
    """Degree-structure violations for both monodromies (empty lists pass)."""
    out = {}
    for kind in (T_KIND, TBAR_KIND):
        m = monodromy(s, kind, validate=False, tol=tol)
        out[kind] = _structure_errors(m.matrix, s.config, kind, tol)
    return out


def spectral_curve(mono, validate=True, tol=1e-10):
    """Characteristic coefficients f_k^(j) of Tbar plus the invariant checks."""
    if mono.kind != TBAR_KIND:
        raise ValueError("spectral_curve needs the Tbar monodromy")
    cfg = mono.config
    curve = char_poly(mono.matrix, M=cfg.M)
    if validate:
        exact = mono.matrix.is_exact()
        scale = max(mono.matrix.max_abs(), 1.0)
        NM = cfg.N * cfg.M
        for j in range(NM + 1):
            c = curve.f_coeff(cfg.N, j)
            want = 1 if j == NM else 0
            if exact:
                if c != want:
                    raise CollapseFailure(f"f_N^({j}) = {c} != {want}")
            elif magnitude(c - want) > tol * scale:
                raise CollapseFailure(f"f_N^({j}) off by {magnitude(c - want):.3g}")
        assert curve.genus == cfg.g
    return curve


def hamiltonian_fn(cfg, index):
    """Callable evaluating the index-th nontrivial curve Hamiltonian (1-based)."""
    labels = None

    def fn(state):
        nonlocal labels
        mono = monodromy(state, TBAR_KIND, validate=False)
        curve = char_poly(mono.matrix, M=cfg.M)
        if labels is None:
            labels = curve.hamiltonian_labels()
            if not 1 <= index <= len(labels):
                raise ValueError(f"Hamiltonian index {index} out of 1..{len(labels)}")
        k, j = labels[index - 1]
        return curve.f_coeff(k, j)

    return fn


def tilde_monodromy(s):
    """Product of the V-variable Lax matrices over sites L..1 (floating only)."""
    cfg = s.config
    V = v_from_canonical(s).V
    mat = lax_tilde(V[cfg.L - 1], cfg.N)
    for n in range(cfg.L - 1, 0, -1):
        mat = mat @ lax_tilde(V[n - 1], cfg.N)
    return mat
