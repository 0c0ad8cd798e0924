"""Exact reference computations, independent of any Monte Carlo path.

Everything here reduces to three ingredients:

* the marginal law of one stirring particle, a rate-1 symmetric walk,
  p_k(t) = e^{-t} I_k(t), computed by ascending series for t <= 30 and by
  a renormalized downward recurrence for larger t;
* uniformized transient distributions of small continuous-time chains
  (the interacting label pair on a truncated grid, and the flux-augmented
  exclusion ring), with Poisson-tail truncation as the only error source;
* quadrature assembling the flux-variance decomposition
  Var J_t = (single-walk term) + (pair-correlation integral).

All functions are deterministic: identical inputs give bit-identical
outputs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

UNIFORMIZATION_TOL = 1e-10


class TruncationError(ValueError):
    """Raised when probability mass leaks past a declared truncation."""


# ---------------------------------------------------------------------------
# single-walk transition probabilities
# ---------------------------------------------------------------------------


@dataclass
class WalkPmf:
    """Law of the rate-1 symmetric walk displacement, |k| <= M."""

    t: float
    M: int
    p: np.ndarray  # p[k + M] = P(X_t = k)

    def at(self, k: int) -> float:
        return float(self.p[k + self.M]) if abs(k) <= self.M else 0.0

    def tail(self, i: int) -> np.ndarray:
        """P(X >= j) for j = i..M as a vector (descending cumulative sum)."""
        c = np.cumsum(self.p[::-1])[::-1]
        return c[i + self.M:]

    @property
    def mass(self) -> float:
        return float(self.p.sum())


def _bessel_series(t: float, M: int) -> np.ndarray:
    """e^{-t} I_k(t) for k = 0..M by the ascending series (t <= ~30)."""
    half = t / 2.0
    out = np.empty(M + 1)
    scale = math.exp(-t)
    for k in range(M + 1):
        # term_0 = (t/2)^k / k!
        term = scale
        for m in range(1, k + 1):
            term *= half / m
        s = term
        m = 0
        while True:
            m += 1
            term *= half * half / (m * (m + k))
            s += term
            if term < 1e-18 * s:
                break
        out[k] = s
    return out


def _bessel_miller(t: float, M: int) -> np.ndarray:
    """e^{-t} I_k(t) for k = 0..M by downward recurrence, normalized with
    the exact identity I_0 + 2 sum_{k>=1} I_k = e^t."""

    def run(kstart: int) -> np.ndarray:
        q = np.zeros(kstart + 2)
        q[kstart + 1] = 0.0
        q[kstart] = 1e-280
        for k in range(kstart, 0, -1):
            q[k - 1] = q[k + 1] + (2.0 * k / t) * q[k]
            if q[k - 1] > 1e260:
                q[: kstart + 2] /= 1e260
        norm = q[0] + 2.0 * q[1: kstart + 1].sum()
        return q[: M + 1] / norm

    kstart = M + max(30, int(2.0 * math.sqrt(t)))
    a = run(kstart)
    b = run(kstart + 40)
    if not np.allclose(a, b, rtol=1e-12, atol=1e-300):
        raise TruncationError("Bessel recurrence failed to stabilize")
    return b


def default_radius(t: float) -> int:
    """Pmf truncation radius leaving < 1e-12 mass outside."""
    return max(30, int(math.ceil(7.5 * math.sqrt(max(t, 1.0)) + 10)))


@lru_cache(maxsize=4096)
def _walk_pmf_cached(t: float, M: int) -> WalkPmf:
    if t < 0:
        raise ValueError("t must be non-negative")
    p = np.zeros(2 * M + 1)
    if t == 0:
        p[M] = 1.0
        return WalkPmf(t, M, p)
    half = _bessel_series(t, M) if t <= 30 else _bessel_miller(t, M)
    p[M:] = half
    p[:M] = half[1:][::-1]
    pmf = WalkPmf(t, M, p)
    if pmf.mass < 1.0 - 1e-12:
        raise TruncationError(
            f"walk pmf mass {pmf.mass} below target at t={t}, M={M}")
    return pmf


def walk_pmf(t: float, M: int | None = None) -> WalkPmf:
    return _walk_pmf_cached(float(t), default_radius(t) if M is None else int(M))


def v_term_exact(t: float, M: int | None = None) -> float:
    """sum_{i>0} [P(X_t >= i) - P(X_t >= i)^2] via exact tail sums."""
    if t == 0:
        return 0.0
    pmf = walk_pmf(t, M)
    T = pmf.tail(1)  # P(X >= i), i = 1..M
    return float(np.sum(T - T * T))


def v_term_two_ways(t: float, M: int | None = None) -> tuple[float, float]:
    """The same quantity as E(X^+) - E[(min of two independent copies)^+],
    assembled through expectation sums rather than tail sums."""
    pmf = walk_pmf(t, M)
    k = np.arange(1, pmf.M + 1)
    pk = pmf.p[pmf.M + 1:]
    ex_plus = float(np.sum(k * pk))
    tail_gt = np.append(pmf.tail(2), 0.0)  # P(X > k), k = 1..M
    pmin = pk * pk + 2.0 * pk * tail_gt
    emin_plus = float(np.sum(k * pmin))
    return v_term_exact(t, M), ex_plus - emin_plus


# ---------------------------------------------------------------------------
# label-pair semigroups on a truncated grid
# ---------------------------------------------------------------------------


@dataclass
class PairSemigroup:
    """Transient law of a pair of labels started at (i, j)."""

    t: float
    M: int
    which: str  # "U" independent pair, "V" interacting (stirring) pair
    start: tuple[int, int]
    dist: np.ndarray  # dist[a + M, b + M]
    boundary_mass: float

    def parity_mass(self, y_parity: int) -> float:
        """P(both coordinates congruent to y_parity mod 2)."""
        n = 2 * self.M + 1
        idx = np.arange(n)
        pick = ((idx + self.M) % 2) == (y_parity % 2)
        return float(self.dist[np.ix_(pick, pick)].sum())

    def both_at_least(self, a0: int, b0: int) -> float:
        return float(self.dist[a0 + self.M:, b0 + self.M:].sum())

    def row_sum(self) -> float:
        return float(self.dist.sum())


@lru_cache(maxsize=64)
def _pair_matrix(M: int, which: str):
    """Uniformized one-step matrix (rate Lambda = 2), transposed CSR."""
    n = 2 * M + 1
    N = n * n

    def sid(a, b):
        return (a + M) * n + (b + M)

    rows, cols, vals = [], [], []
    for a in range(-M, M + 1):
        for b in range(-M, M + 1):
            s = sid(a, b)
            if which == "V" and abs(a - b) == 1:
                moves = [(b, a)]
                if a < b:
                    moves += [(a - 1, b), (a, b + 1)]
                else:
                    moves += [(a + 1, b), (a, b - 1)]
            else:
                moves = [(a - 1, b), (a + 1, b), (a, b - 1), (a, b + 1)]
            stay = 1.0 - 0.25 * len(moves)
            for (a2, b2) in moves:
                if abs(a2) > M or abs(b2) > M:
                    stay += 0.25  # reflected into a self-loop; tracked as leak
                else:
                    rows.append(s)
                    cols.append(sid(a2, b2))
                    vals.append(0.25)
            rows.append(s)
            cols.append(s)
            vals.append(stay)
    P = sp.csr_matrix((vals, (rows, cols)), shape=(N, N))
    return P.T.tocsr()


def _uniformized_apply(PT, v: np.ndarray, lam: float,
                       tol: float = UNIFORMIZATION_TOL) -> np.ndarray:
    """Poisson mixture sum_k w_k P^k v with tail truncation below tol."""
    if lam <= 0:
        return v.copy()
    out = np.zeros_like(v)
    vk = v.copy()
    loglam = math.log(lam)
    cum = 0.0
    k = 0
    while True:
        w = math.exp(k * loglam - lam - math.lgamma(k + 1))
        out += w * vk
        cum += w
        if cum >= 1.0 - tol and k >= lam:
            break
        vk = PT.dot(vk)
        k += 1
        if k > 1000 + 10 * lam:
            raise TruncationError("uniformization failed to converge")
    return out


class PairEvolver:
    """Sequential evolution of a pair law through increasing times."""

    def __init__(self, i: int, j: int, M: int, which: str):
        if which not in ("U", "V"):
            raise ValueError("which must be 'U' or 'V'")
        if max(abs(i), abs(j)) > M // 2:
            raise ValueError("start too close to the truncation boundary")
        self.M = M
        self.which = which
        self.start = (i, j)
        self.t = 0.0
        n = 2 * M + 1
        self._PT = _pair_matrix(M, which)
        self.v = np.zeros(n * n)
        self.v[(i + M) * n + (j + M)] = 1.0

    def advance_to(self, t: float) -> None:
        if t < self.t - 1e-12:
            raise ValueError("cannot evolve backwards")
        dt = t - self.t
        if dt > 0:
            self.v = _uniformized_apply(self._PT, self.v, 2.0 * dt)
        self.t = t

    def snapshot(self) -> PairSemigroup:
        n = 2 * self.M + 1
        dist = self.v.reshape(n, n)
        edge = np.zeros((n, n), bool)
        edge[:2, :] = edge[-2:, :] = edge[:, :2] = edge[:, -2:] = True
        return PairSemigroup(self.t, self.M, self.which, self.start,
                             dist.copy(), float(dist[edge].sum()))


def pair_distribution(i: int, j: int, t: float, M: int | None = None,
                      which: str = "V",
                      leak_tol: float = 1e-8) -> PairSemigroup:
    """Transient law of the label pair; raises when boundary leakage
    exceeds leak_tol."""
    if M is None:
        M = default_radius(t) + max(abs(i), abs(j))
    ev = PairEvolver(i, j, M, which)
    ev.advance_to(t)
    snap = ev.snapshot()
    if snap.boundary_mass > leak_tol:
        raise TruncationError(
            f"pair law leaked {snap.boundary_mass:.3g} past M={M} at t={t}")
    return snap


# ---------------------------------------------------------------------------
# flux variance for the flat start
# ---------------------------------------------------------------------------


@dataclass
class FluxVariance:
    value: float
    v_term: float
    e_term: float
    panels: int


def _parity_square_sums(u: float) -> tuple[float, float]:
    """(sum_{y even} P(Y_u = y)^2, sum over odd y)."""
    pmf = walk_pmf(u)
    sq = pmf.p * pmf.p
    idx = np.arange(-pmf.M, pmf.M + 1)
    even = (idx % 2) == 0
    return float(sq[even].sum()), float(sq[~even].sum())


def flux_variance_exact(t: float, rel_tol: float = 1e-4,
                        max_panels: int = 4096) -> FluxVariance:
    """Var J_t for the flat start: single-walk term plus the pair integral

        -int_0^t sum_par [sum_{y≡par} P(Y_{t-s}=y)^2] *
                  P(both labels of the adjacent stirring pair ≡ par at s) ds,

    evaluated by Simpson quadrature refined until the integral changes by
    less than rel_tol."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        return FluxVariance(0.0, 0.0, 0.0, 0)
    vt = v_term_exact(t)
    M = default_radius(t) + 4

    def integral(panels: int) -> float:
        s_nodes = np.linspace(0.0, t, panels + 1)
        ev = PairEvolver(0, 1, M, "V")
        f = np.empty(panels + 1)
        for k, s in enumerate(s_nodes):
            ev.advance_to(s)
            snap = ev.snapshot()
            w_even, w_odd = _parity_square_sums(t - s)
            f[k] = w_even * snap.parity_mass(0) + w_odd * snap.parity_mass(1)
        h = t / panels
        return float(h / 3.0 * (f[0] + f[-1] + 4.0 * f[1:-1:2].sum()
                                + 2.0 * f[2:-1:2].sum()))

    panels = 8
    prev = integral(panels)
    while True:
        panels *= 2
        cur = integral(panels)
        if abs(cur - prev) <= rel_tol * max(abs(cur), 1e-30):
            break
        if panels >= max_panels:
            raise TruncationError("flux variance quadrature did not converge")
        prev = cur
    et = -cur
    return FluxVariance(vt + et, vt, et, panels)


# ---------------------------------------------------------------------------
# exact finite-ring exclusion with flux augmentation
# ---------------------------------------------------------------------------


class RingChain:
    """Flux-augmented exclusion chain on a small ring.

    The uniformized one-step matrix (rate L/2) coincides with the one-step
    matrix of the discrete scheme that applies one uniform mark per step,
    so the same object yields both the continuous-time transient law
    (Poisson mixture) and the exact discrete-chain law (matrix powers).
    """

    def __init__(self, L: int, J_max: int):
        if L % 2 or L < 4 or L > 10:
            raise ValueError("exact ring supports even L in [4, 10]")
        self.L = L
        self.J_max = J_max
        self.nJ = 2 * J_max + 1
        self.configs = np.array(
            [c for c in itertools.product((0, 1), repeat=L) if sum(c) == L // 2],
            dtype=np.uint8)
        self._cfg_index = {tuple(c): i for i, c in enumerate(self.configs)}
        self._PT = self._build().T.tocsr()

    def _build(self):
        L, nJ, Jm = self.L, self.nJ, self.J_max
        rows, cols, vals = [], [], []
        for ci, cfg in enumerate(self.configs):
            cfg = tuple(int(v) for v in cfg)
            stay = 0.0
            targets = []
            for x in range(L):
                xm = (x - 1) % L
                if cfg[xm] == cfg[x]:
                    stay += 1.0 / L
                    continue
                swapped = list(cfg)
                swapped[xm], swapped[x] = swapped[x], swapped[xm]
                dj = 0
                if x == 0:
                    dj = 1 if cfg[xm] == 1 else -1
                targets.append((self._cfg_index[tuple(swapped)], dj))
            for j in range(-Jm, Jm + 1):
                s = ci * nJ + (j + Jm)
                if stay > 0:
                    rows.append(s)
                    cols.append(s)
                    vals.append(stay)
                for (cj, dj) in targets:
                    j2 = min(max(j + dj, -Jm), Jm)  # saturate: tracked leak
                    rows.append(s)
                    cols.append(cj * nJ + (j2 + Jm))
                    vals.append(1.0 / L)
        N = len(self.configs) * nJ
        return sp.csr_matrix((vals, (rows, cols)), shape=(N, N))

    def initial(self, bits=None) -> np.ndarray:
        if bits is None:
            bits = tuple(x & 1 for x in range(self.L))  # flat start
        v = np.zeros(len(self.configs) * self.nJ)
        v[self._cfg_index[tuple(int(b) for b in bits)] * self.nJ + self.J_max] = 1.0
        return v

    def transient(self, t: float, bits=None) -> "ExactRing":
        v = _uniformized_apply(self._PT, self.initial(bits), self.L / 2.0 * t)
        return ExactRing(self, t, v)

    def discrete(self, n_steps: int, bits=None) -> "ExactRing":
        v = self.initial(bits)
        for _ in range(n_steps):
            v = self._PT.dot(v)
        return ExactRing(self, 2.0 * n_steps / self.L, v)


@dataclass
class ExactRing:
    chain: RingChain
    t: float
    v: np.ndarray

    def _grid(self) -> np.ndarray:
        return self.v.reshape(len(self.chain.configs), self.chain.nJ)

    @property
    def boundary_mass(self) -> float:
        g = self._grid()
        return float(g[:, 0].sum() + g[:, -1].sum())

    def check_leakage(self, tol: float = 1e-8) -> None:
        if self.boundary_mass > tol:
            raise TruncationError(
                f"flux range +-{self.chain.J_max} leaked {self.boundary_mass:.3g}")

    def occupation_marginals(self) -> np.ndarray:
        g = self._grid().sum(axis=1)
        return g @ self.chain.configs.astype(float)

    def flux_pmf(self) -> np.ndarray:
        """P(J = j) for j = -J_max..J_max."""
        return self._grid().sum(axis=0)

    def flux_mean(self) -> float:
        j = np.arange(-self.chain.J_max, self.chain.J_max + 1)
        return float(self.flux_pmf() @ j)

    def flux_variance(self) -> float:
        j = np.arange(-self.chain.J_max, self.chain.J_max + 1)
        p = self.flux_pmf()
        m = p @ j
        return float(p @ (j * j) - m * m)

    def height_marginal(self, x: int, anchor: int = 0) -> dict[int, float]:
        """Exact law of the coupled free-process height at site x, using
        height(0) = anchor + 2J and integrating gradients along the ring."""
        steps = x - 2 * self.chain.configs[:, :x].astype(np.int64).sum(axis=1)
        j = np.arange(-self.chain.J_max, self.chain.J_max + 1)
        out: dict[int, float] = {}
        g = self._grid()
        for ci in range(len(self.chain.configs)):
            for ji, jj in enumerate(j):
                p = g[ci, ji]
                if p == 0.0:
                    continue
                val = anchor + 2 * int(jj) + int(steps[ci])
                out[val] = out.get(val, 0.0) + float(p)
        return out

    def mean_height_average(self, anchor: int = 0) -> float:
        """E of the site-averaged coupled free height."""
        cfg = self.chain.configs.astype(np.int64)
        prefix = np.cumsum(1 - 2 * cfg, axis=1)
        # height(x) = anchor + 2J + sum_{y<x} step(y); average over x
        site_avg = (np.hstack([np.zeros((cfg.shape[0], 1), np.int64),
                               prefix[:, :-1]])).mean(axis=1)
        j = np.arange(-self.chain.J_max, self.chain.J_max + 1)
        g = self._grid()
        return float((g.sum(axis=1) * (anchor + site_avg)).sum()
                     + 2.0 * (g.sum(axis=0) * j).sum())


@lru_cache(maxsize=32)
def _ring_chain(L: int, J_max: int) -> RingChain:
    return RingChain(L, J_max)


def exact_ring_transient(L: int, t: float, J_max: int | None = None,
                         leak_tol: float = 1e-8) -> ExactRing:
    """Continuous-time transient law of the flux-augmented exclusion ring
    from the flat start."""
    if J_max is None:
        J_max = max(12, int(math.ceil(3.0 * t + 12)))
    ring = _ring_chain(L, J_max).transient(t)
    ring.check_leakage(leak_tol)
    return ring


def exact_ring_discrete(L: int, n_steps: int, J_max: int | None = None,
                        leak_tol: float = 1e-8) -> ExactRing:
    """Exact law of the discrete chain (one uniform mark per step)."""
    if J_max is None:
        J_max = max(12, n_steps + 2)
    ring = _ring_chain(L, J_max).discrete(n_steps)
    ring.check_leakage(leak_tol)
    return ring
