"""Symmetric simple exclusion on the ring: stirring labels, duality, and
the integrated flux through the distinguished bond (L-1, 0).

A mark at site x swaps the contents of bond (x-1, x); stirring labels swap
with the contents, and each label carries its exact signed displacement so
ring winding never corrupts the flux bookkeeping.  The crossing counter at
the distinguished bond gains +1 for a rightward particle hop (L-1 -> 0).

Under the flat start (particles on the odd sublattice, the gradient image
of the flat interface) the counter satisfies two exact identities checked
throughout the test suite: it equals the stirring sum of left-started
particles now right of the bond minus right-started particles now left,
and twice the counter equals the height change at the origin of the free
interface driven by the same marks.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import kernels as K
from .lattice import OccupationField, height_to_occupation, new_flat


def debug_enabled() -> bool:
    """Extra invariant assertions between update batches (WALLSEP_DEBUG=1)."""
    return os.environ.get("WALLSEP_DEBUG", "") not in ("", "0")


@dataclass
class StirringState:
    """The stirring bijection and its inverse, with exact displacements."""

    position: np.ndarray  # label -> current ring site (the map X)
    label: np.ndarray     # ring site -> label currently there (the map D)
    displacement: np.ndarray  # label -> signed total displacement

    @classmethod
    def identity(cls, L: int) -> "StirringState":
        return cls(np.arange(L, dtype=np.int64),
                   np.arange(L, dtype=np.int64),
                   np.zeros(L, dtype=np.int64))

    @property
    def L(self) -> int:
        return self.position.shape[0]

    def is_bijective(self) -> bool:
        idx = np.arange(self.L)
        return (np.array_equal(self.position[self.label], idx)
                and np.array_equal(self.label[self.position], idx))

    def true_positions(self) -> np.ndarray:
        """Signed positions: start site mapped into (-L/2, L/2] plus the
        exact displacement."""
        return signed_positions(self.L) + self.displacement

    @property
    def max_displacement(self) -> int:
        return int(np.abs(self.displacement).max())


def signed_positions(L: int) -> np.ndarray:
    """Signed position of each ring site, distinguished bond at -1/2."""
    s = np.arange(L, dtype=np.int64)
    return np.where(s < L // 2, s, s - L)


@dataclass
class FluxCounter:
    """Signed crossing count at the distinguished bond (L-1, 0)."""

    L: int
    J: int = 0


@dataclass
class FluxDecomposition:
    H: int       # initially-left particles now at position >= 0
    H_strict: int  # initially-right particles now at position < -1
    I: int       # initially-right particles now at position < 0

    @property
    def J(self) -> int:
        return self.H - self.I


@dataclass
class ExclusionState:
    """One trajectory's full state; heights are the coupled free interface
    evolved from the same mark stream (present only when tracked)."""

    bits: np.ndarray
    stirring: StirringState
    flux: FluxCounter
    eta0: np.ndarray
    heights: np.ndarray | None
    anchor: int
    t: float = 0.0
    max_disp: int = 0

    @property
    def L(self) -> int:
        return self.bits.shape[0]

    @property
    def occupation(self) -> OccupationField:
        return OccupationField(self.bits.copy())

    def winding_safe(self) -> bool:
        """True while the counter/stirring-sum equality is provably exact."""
        return self.max_disp <= self.L // 2 - 2


def flat_occupation(L: int) -> OccupationField:
    """Gradient image of the flat interface: particles on odd sites."""
    return height_to_occupation(new_flat(L))


def product_measure_init(L: int, rho: float, seed: int) -> OccupationField:
    """i.i.d. Bernoulli(rho) occupations from the replica stream."""
    if not 0.0 < rho < 1.0:
        raise ValueError("density must lie strictly between 0 and 1")
    u = K.stream_u64(int(seed) & K.MASK64, L)
    threshold = np.uint64(round(rho * 2.0 ** 64)) if rho < 1.0 else np.uint64(-1)
    return OccupationField((u < threshold).astype(np.uint8))


def initial_state(eta: OccupationField, track_heights: bool = True,
                  anchor: int = 0) -> ExclusionState:
    L = eta.L
    h = None
    if track_heights:
        from .lattice import occupation_to_height
        h = occupation_to_height(eta, anchor).heights
    return ExclusionState(eta.bits.copy(), StirringState.identity(L),
                          FluxCounter(L), eta.bits.copy(), h, anchor)


def step_exclusion(state: ExclusionState, x: int) -> None:
    """Apply one mark at site x: swap bond (x-1, x), labels, flux, heights."""
    L = state.L
    x %= L
    xm = (x - 1) % L
    st = state.stirring
    a, b = st.label[xm], st.label[x]
    st.label[xm], st.label[x] = b, a
    st.position[a], st.position[b] = x, xm
    st.displacement[a] += 1
    st.displacement[b] -= 1
    state.max_disp = max(state.max_disp,
                         abs(int(st.displacement[a])), abs(int(st.displacement[b])))
    va, vb = int(state.bits[xm]), int(state.bits[x])
    if va != vb:
        state.bits[xm], state.bits[x] = vb, va
        if x == 0:
            state.flux.J += 1 if va == 1 else -1
    if state.heights is not None:
        hh = state.heights
        xp = (x + 1) % L
        lap = hh[xp] - 2 * hh[x] + hh[xm]
        hh[x] += lap


def evolve_exclusion(state: ExclusionState, dt: float, seed: int) -> None:
    """Continuous-time evolution for time dt (Poisson marks), in place.

    With WALLSEP_DEBUG set, evolution proceeds in batches of roughly 10^6
    expected events and the bijectivity/consistency invariants are spot-
    asserted between batches.
    """
    track = state.heights is not None
    h = state.heights if track else np.zeros(state.L, np.int64)
    batches = 1
    if debug_enabled():
        batches = max(1, int(math.ceil(0.5 * state.L * dt / 1e6)))
    for i in range(batches):
        dj, dmax, _ = K.sep_run(state.bits, state.stirring.position,
                                state.stirring.label,
                                state.stirring.displacement,
                                h, track, dt / batches,
                                K.useed(K.derive_seed(seed, i) if batches > 1
                                        else seed))
        state.flux.J += int(dj)
        state.max_disp = max(state.max_disp, int(dmax))
        if batches > 1:
            _assert_consistent(state)
    state.t += dt


def _assert_consistent(state: ExclusionState) -> None:
    assert state.stirring.is_bijective(), "stirring lost bijectivity"
    assert int(state.bits.sum()) == int(state.eta0.sum()), \
        "particle number not conserved"
    if state.heights is not None:
        grad = np.roll(state.heights, -1) - state.heights
        assert np.array_equal(((1 - grad) // 2).astype(np.uint8), state.bits), \
            "height field and occupation image desynchronized"


def flux_from_stirring(stirring: StirringState, eta0: np.ndarray) -> int:
    """Stirring-sum form of the flux: particles that started left of the
    distinguished bond and sit at signed position >= 0, minus particles
    that started right and sit below 0."""
    eta0 = np.asarray(eta0)
    start = signed_positions(stirring.L)
    now = stirring.true_positions()
    part = eta0 == 1
    H = int(np.count_nonzero(part & (start < 0) & (now >= 0)))
    I = int(np.count_nonzero(part & (start >= 0) & (now < 0)))
    return H - I


def flux_decomposition(stirring: StirringState, eta0: np.ndarray,
                       flux: FluxCounter | None = None) -> FluxDecomposition:
    """H / H' / I counts; validates |H' - I| <= 1 and, when the counter is
    supplied, J = H - I."""
    eta0 = np.asarray(eta0)
    start = signed_positions(stirring.L)
    now = stirring.true_positions()
    part = eta0 == 1
    H = int(np.count_nonzero(part & (start < 0) & (now >= 0)))
    I = int(np.count_nonzero(part & (start >= 0) & (now < 0)))
    Hp = int(np.count_nonzero(part & (start >= 0) & (now < -1)))
    if abs(Hp - I) > 1:
        raise AssertionError(f"|H'-I| = {abs(Hp - I)} exceeds 1")
    if flux is not None and flux.J != H - I:
        raise AssertionError(f"counter J={flux.J} != H-I={H - I}")
    return FluxDecomposition(H, Hp, I)


def duality_check(eta0: np.ndarray, eta_t: np.ndarray,
                  stirring: StirringState) -> bool:
    """eta_t(y) == eta_0(label at y) at every site."""
    eta0 = np.asarray(eta0)
    eta_t = np.asarray(eta_t)
    return bool(np.array_equal(eta_t, eta0[stirring.label]))


def height_flux_identity_run(L: int, t: float, seed: int) -> tuple[int, int]:
    """Drive the free interface and the exclusion process from one mark
    stream; returns (height change at the origin, twice the flux)."""
    state = initial_state(flat_occupation(L), track_heights=True, anchor=0)
    evolve_exclusion(state, t, seed)
    dz = int(state.heights[0]) - state.anchor
    return dz, 2 * state.flux.J


def flat_flux_mean(t: float) -> float:
    """Exact E J_t at the distinguished bond for the flat start: the
    telescoped stirring sum equals P(walk displacement positive odd)."""
    return 0.25 * (1.0 - math.exp(-2.0 * t))


def ring_size_ok(L: int, t: float, factor: float = 4.0) -> bool:
    """Ring-vs-line discipline: L must dominate the information spread."""
    return L >= factor * 2.0 * math.sqrt(max(t, 1.0) * math.log(max(t, 2.0)))


@dataclass
class PooledFluxVariance:
    estimate: float
    ci_low: float
    ci_high: float
    n_replicas: int
    per_replica: np.ndarray


def pooled_flux_variance(sums: np.ndarray, L: int, t: float, flat_start: bool,
                         level: float = 0.99) -> PooledFluxVariance:
    """Variance of the bond flux pooled over all L translation-equivalent
    bond counters, centred at the exact per-class mean (+-flat_flux_mean
    for the flat start, 0 for product starts); confidence interval from
    replica batching.

    `sums` is one checkpoint slice of `kernels.flux_allbonds_ensemble`:
    columns (sum_b J_b, sum_b J_b^2, sum over even bonds, squares there).
    """
    from scipy import stats

    s1, s2, e1, _ = (sums[:, i] for i in range(4))
    if flat_start:
        c = flat_flux_mean(t)
        # sum_b (J_b - mu_b)^2 with mu_b = +c on even bonds, -c on odd ones
        v_rep = (s2 - 2.0 * c * (2.0 * e1 - s1) + L * c * c) / L
    else:
        v_rep = s2 / L
    n = v_rep.shape[0]
    est = float(v_rep.mean())
    se = float(v_rep.std(ddof=1) / math.sqrt(n))
    q = float(stats.t.ppf(0.5 + level / 2.0, n - 1))
    return PooledFluxVariance(est, est - q * se, est + q * se, n, v_rep)
