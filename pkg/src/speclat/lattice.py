"""Lattice configuration, states, invariants and Hamiltonian time evolution.

Sites are 1-based and cyclic modulo L = N(N-1)M.  The state of record is the
canonical one (P_n, Q_n); V_n is derived through the multiplicative change of
variables, and the V-only vector field is kept as an independent cross-check
of the canonical flow.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ChainMismatch, InvalidSize, StepRejected
from .scalars import Dual, exact_nth_root, magnitude, value


@dataclass(frozen=True)
class LatticeConfig:
    N: int
    M: int
    L: int
    g: int


def make_config(N, M):
    """Validated configuration with L = N(N-1)M sites and genus (N-1)(MN-2)/2."""
    if not isinstance(N, int) or not isinstance(M, int) or N < 2 or M < 1:
        raise InvalidSize(f"need integer N >= 2 and M >= 1, got N={N}, M={M}")
    L = N * (N - 1) * M
    g = (N - 1) * (M * N - 2) // 2
    # the nontrivial-integral count matches the genus
    assert sum(k * M - 1 for k in range(1, N)) == g
    return LatticeConfig(N=N, M=M, L=L, g=g)


@dataclass(frozen=True)
class CanonicalState:
    config: LatticeConfig
    P: tuple
    Q: tuple

    def __post_init__(self):
        if len(self.P) != self.config.L or len(self.Q) != self.config.L:
            raise InvalidSize("P, Q must have length L")

    def p(self, n):
        """P at 1-based cyclic site n."""
        return self.P[(n - 1) % self.config.L]

    def q(self, n):
        return self.Q[(n - 1) % self.config.L]


@dataclass(frozen=True)
class LVState:
    config: LatticeConfig
    V: tuple

    def __post_init__(self):
        if len(self.V) != self.config.L:
            raise InvalidSize("V must have length L")

    def v(self, n):
        return self.V[(n - 1) % self.config.L]


@dataclass(frozen=True)
class InvariantSet:
    """Center elements of the lattice algebra plus the first Hamiltonian."""
    P0: object
    Pchain: tuple   # P_k, k = 1..N-1
    Pprime: tuple   # P'_k, k = 1..N
    H1: object

    def as_list(self):
        return [("P0", self.P0)] + \
            [(f"P{k+1}", v) for k, v in enumerate(self.Pchain)] + \
            [(f"Pp{k+1}", v) for k, v in enumerate(self.Pprime)] + \
            [("H1", self.H1)]


def v_from_canonical(s):
    """V_n = (P_n ... P_{n+N-1})^(-1) Q_n^(-1) Q_{n+N-1}, cyclic indices."""
    cfg = s.config
    V = []
    for n in range(1, cfg.L + 1):
        prod = s.p(n)
        for k in range(1, cfg.N):
            prod = prod * s.p(n + k)
        V.append(s.q(n + cfg.N - 1) / (prod * s.q(n)))
    return LVState(config=cfg, V=tuple(V))


def chain_products(v):
    """The N-1 products P_k = prod_{n=1..NM} V_{(N-1)n+k}, cyclic."""
    cfg = v.config
    out = []
    for k in range(1, cfg.N):
        prod = 1
        for n in range(1, cfg.N * cfg.M + 1):
            prod = prod * v.v((cfg.N - 1) * n + k)
        out.append(prod)
    return out


def lift_to_canonical(v, Qseed=None, rel_tol=1e-12):
    """Canonical lift on the equal-chain-product sector.

    Sets P_n = c with c = P_1^(-1/(N^2 M)) and propagates Q along each of the
    N-1 residue chains from the seeds via Q_{n+N-1} = V_n c^N Q_n.  Rational
    states get a dyadic-rational c (binary approximation of the real root) so
    the downstream pipeline stays exact; the round trip then reproduces V to
    ~1e-15 relative.
    """
    cfg = v.config
    if Qseed is None:
        Qseed = tuple(type(v.V[0])(1) if isinstance(v.V[0], Fraction) else 1
                      for _ in range(cfg.N - 1))
    if len(Qseed) != cfg.N - 1:
        raise InvalidSize("Qseed must have length N-1")

    chains = chain_products(v)
    base = chains[0]
    for k, pk in enumerate(chains[1:], start=2):
        if magnitude(pk - base) > rel_tol * magnitude(base):
            raise ChainMismatch(
                f"P_1 = {base} but P_{k} = {pk}: state is outside the "
                "equal-chain-product sector")

    exact = isinstance(base, Fraction) or isinstance(base, int)
    root = cfg.N * cfg.N * cfg.M
    if exact:
        c = exact_nth_root(Fraction(1, 1) / Fraction(base), root)
        if c is None:
            # dyadic approximation keeps the state exactly representable
            c = Fraction(float(base) ** (-1.0 / root))
    else:
        c = float(base) ** (-1.0 / root)

    cN = c ** cfg.N
    Q = [None] * cfg.L
    for r in range(1, cfg.N):
        Q[r - 1] = Qseed[r - 1]
        site = r
        for _ in range(cfg.N * cfg.M - 1):
            nxt = site + cfg.N - 1
            Q[(nxt - 1) % cfg.L] = v.v(site) * cN * Q[(site - 1) % cfg.L]
            site = nxt
    # residue 0 chain is the tail of chain N-1 shifted; for N >= 2 the chains
    # above cover residues 1..N-1 mod (N-1) which is all residues when N = 2,
    # otherwise residue 0 == residue N-1 is covered too.
    if any(q is None for q in Q):
        # stepping by N-1 from seeds 1..N-1 covers every site exactly once
        raise AssertionError("chain propagation left unset sites")
    return CanonicalState(config=cfg, P=tuple(c for _ in range(cfg.L)),
                          Q=tuple(Q))


def lv_vector_field(v):
    """(dV/dt)_n = 2 V_n sum_{k=1..N-1} (V_{n+k} - V_{n-k}), cyclic."""
    cfg = v.config
    out = []
    for n in range(1, cfg.L + 1):
        acc = 0
        for k in range(1, cfg.N):
            acc = acc + (v.v(n + k) - v.v(n - k))
        out.append(2 * v.v(n) * acc)
    return out


def invariants(v):
    """Center elements P_0, P_k, P'_k and the Hamiltonian H_1 = sum V_n."""
    cfg = v.config
    prod_all = 1
    for x in v.V:
        prod_all = prod_all * x
    if isinstance(prod_all, (int, Fraction)):
        p0 = exact_nth_root(Fraction(1, 1) / Fraction(prod_all), cfg.N)
        if p0 is None:
            p0 = float(prod_all) ** (-1.0 / cfg.N)
    elif isinstance(prod_all, Dual):
        p0 = prod_all ** Fraction(-1, cfg.N)
    else:
        p0 = prod_all ** (-1.0 / cfg.N)

    pchain = tuple(chain_products(v))
    pprime = []
    for k in range(1, cfg.N + 1):
        prod = 1
        for n in range(1, (cfg.N - 1) * cfg.M + 1):
            prod = prod * v.v(cfg.N * n + k)
        pprime.append(prod)
    h1 = 0
    for x in v.V:
        h1 = h1 + x
    return InvariantSet(P0=p0, Pchain=pchain, Pprime=tuple(pprime), H1=h1)


# -- dual seeding -------------------------------------------------------------

def seed_log_duals(s, exact=False):
    """Canonical state with P, Q seeded along the log coordinates.

    Slot n-1 is p_n = log P_n and slot L+n-1 is q_n = log Q_n, so dP_n/dp_n =
    P_n and dQ_n/dq_n = Q_n; the bracket engine contracts these gradients.
    """
    L = s.config.L
    width = 2 * L
    P = tuple(Dual.seeded(s.P[i], i, width, scale=s.P[i], exact=exact)
              for i in range(L))
    Q = tuple(Dual.seeded(s.Q[i], L + i, width, scale=s.Q[i], exact=exact)
              for i in range(L))
    return CanonicalState(config=s.config, P=P, Q=Q)


def state_from_logs(config, u):
    """CanonicalState from the stacked log vector u = (p_1..p_L, q_1..q_L)."""
    L = config.L
    P = tuple(float(np.exp(u[i])) for i in range(L))
    Q = tuple(float(np.exp(u[L + i])) for i in range(L))
    return CanonicalState(config=config, P=P, Q=Q)


def logs_from_state(s):
    L = s.config.L
    u = np.empty(2 * L)
    u[:L] = [np.log(float(value(p))) for p in s.P]
    u[L:] = [np.log(float(value(q))) for q in s.Q]
    return u


def _check_state_ok(config, u):
    if not np.all(np.isfinite(u)):
        raise StepRejected("non-finite log coordinates; reduce dt")
    if np.max(np.abs(u)) > 500.0:
        raise StepRejected("V left (0, inf) within a step; reduce dt")


def evolve(s, h, t, dt, observer=None):
    """Fixed-step RK4 of the flow df/dt = {f, h} in log-canonical coordinates.

    In those coordinates pdot_n = dh/dq_n and qdot_n = -dh/dp_n.  Gradients of
    ``h`` come from one dual-extended evaluation through the full pipeline per
    stage.  Emits the state at every step (including the initial one).
    """
    if dt <= 0 or t <= 0:
        raise InvalidSize("need t > 0 and dt > 0")
    cfg = s.config
    L = cfg.L

    if h == "H1" or h is None:
        def h_fn(state):
            acc = 0
            for x in v_from_canonical(state).V:
                acc = acc + x
            return acc
    elif callable(h):
        h_fn = h
    else:
        raise ValueError(f"unknown Hamiltonian selector {h!r}")

    def rhs(u):
        _check_state_ok(cfg, u)
        state = seed_log_duals(state_from_logs(cfg, u))
        val = h_fn(state)
        g = np.real(np.asarray(val.grad, dtype=complex))
        du = np.empty(2 * L)
        du[:L] = g[L:]      # pdot = dh/dq
        du[L:] = -g[:L]     # qdot = -dh/dp
        return du

    n_steps = int(round(t / dt))
    u = logs_from_state(s)
    out = [state_from_logs(cfg, u)]
    if observer is not None:
        observer(0.0, out[0])
    for step in range(n_steps):
        k1 = rhs(u)
        k2 = rhs(u + 0.5 * dt * k1)
        k3 = rhs(u + 0.5 * dt * k2)
        k4 = rhs(u + dt * k3)
        u = u + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        _check_state_ok(cfg, u)
        state = state_from_logs(cfg, u)
        out.append(state)
        if observer is not None:
            observer((step + 1) * dt, state)
    return out
