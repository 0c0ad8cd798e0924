"""Evolution of the walled and free interfaces and the two couplings.

Schedules
---------
DISCRETE applies one uniform-site mark per step and advances time by 2/L
(the chain whose one-step operator Poissonizes into the continuous-time
semigroup); CONTINUOUS draws a Poisson(L t / 2) number of marks, which is
the Harris construction in batch form.  The monotone coupling uses two
independent mark families (up-marks and down-marks, rate 1/2 each); its
discrete analogue draws a site and a fair coin per step and advances time
by 1/L so the per-site flip rates match the single-clock schedules.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import kernels as K
from .lattice import HeightField, laplacian


class UpdateRule(enum.Enum):
    WALL = "wall"
    FREE = "free"


class ClockFamily(enum.Enum):
    SINGLE = "single"    # one mark stream per site
    UP_DOWN = "up_down"  # independent up and down streams per site


class ScheduleKind(enum.Enum):
    DISCRETE = "discrete"
    CONTINUOUS = "continuous"


@dataclass
class EvolveResult:
    field: HeightField
    actual_t: float
    n_events: int


def step_discrete(h: HeightField, x: int, rule: UpdateRule) -> HeightField:
    """One mark at site x; the wall rule suppresses moves below height 0."""
    out = h.copy()
    lap = laplacian(h, x)
    if lap != 0:
        nh = out.heights[x % h.L] + lap
        if rule is UpdateRule.FREE or nh >= 0:
            out.heights[x % h.L] = nh
    return out


def apply_site_sequence(h: HeightField, sites, rule: UpdateRule) -> HeightField:
    """Deterministic mark sequence (used by couplings and enumeration tests)."""
    out = h.copy()
    hh = out.heights
    L = h.L
    walled = rule is UpdateRule.WALL
    for x in sites:
        x %= L
        xp = (x + 1) % L
        xm = (x - 1) % L
        lap = hh[xp] - 2 * hh[x] + hh[xm]
        if lap != 0:
            nh = hh[x] + lap
            if not walled or nh >= 0:
                hh[x] = nh
    return out


def evolve(h: HeightField, t: float, schedule: ScheduleKind, rule: UpdateRule,
           seed: int) -> EvolveResult:
    """Single-clock evolution for time t; deterministic given the seed.

    For the discrete schedule, t is rounded down to a whole number of
    2/L steps and the actual time is reported.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    out = h.copy()
    walled = rule is UpdateRule.WALL
    if walled and not h.walled:
        out.walled = True
        if out.heights.min() < 0:
            raise ValueError("wall rule applied to a field below the wall")
    actual, n = K.height_run(out.heights, walled,
                             0 if schedule is ScheduleKind.DISCRETE else 1,
                             float(t), K.useed(seed))
    from .exclusion import debug_enabled

    if debug_enabled():
        out.validate()
    return EvolveResult(out, float(actual), int(n))


def monotone_coupled_evolve(xi: HeightField, zeta: HeightField, t: float,
                            seed: int,
                            schedule: ScheduleKind = ScheduleKind.CONTINUOUS,
                            ) -> tuple[HeightField, HeightField]:
    """Wall process xi and free process zeta driven by the same up/down
    mark realizations; preserves zeta <= xi pointwise (checked at every
    event) and never lets xi go negative."""
    if xi.L != zeta.L:
        raise ValueError("coupled fields must share the ring length")
    if np.any(zeta.heights > xi.heights):
        raise ValueError("initial domination zeta <= xi violated")
    lo, hi = zeta.copy(), xi.copy()
    bad, _, _ = K.monotone_pair_evolve(
        lo.heights, hi.heights, False, True,
        0 if schedule is ScheduleKind.DISCRETE else 1, float(t), K.useed(seed))
    if bad & 1:
        raise AssertionError("monotone coupling lost the domination order")
    if bad & 2:
        raise AssertionError("wall rule produced a negative height")
    hi.walled = True
    return hi, lo


def basic_coupled_walled_pair(L: int, r_low: int, r_high: int, t: float,
                              seed: int) -> tuple[HeightField, HeightField]:
    """Two walled copies from flat starts r_low <= r_high under the basic
    (shared up/down marks) coupling; returns (lower, upper)."""
    from .lattice import new_flat
    lo = new_flat(L, r_low, walled=True)
    hi = new_flat(L, r_high, walled=True)
    bad, _, _ = K.monotone_pair_evolve(lo.heights, hi.heights, True, True,
                                       1, float(t), K.useed(seed))
    if bad & 1:
        raise AssertionError("basic coupling lost the domination order")
    return lo, hi


def shared_site_coupled_evolve(xi: HeightField, zeta: HeightField, t: float,
                               seed: int) -> tuple[HeightField, HeightField]:
    """Wall and free fields updated at the identical uniform site sequence
    (discrete schedule).  Marginals match the uncoupled discrete chains;
    the order zeta <= xi is *not* preserved in general."""
    if xi.L != zeta.L:
        raise ValueError("coupled fields must share the ring length")
    a, b = xi.copy(), zeta.copy()
    a.walled = True
    K.shared_pair_evolve(a.heights, b.heights, float(t), K.useed(seed))
    return a, b


@dataclass
class WitnessReport:
    """Instrumentation for the discrepancy-propagation picture: where the
    wall blocked the coupled pair and whether the free field dipped below
    the wall inside the observation window."""

    origin_differs: bool
    zeta_dipped_in_window: bool
    blocked_events: int
    leftmost_block: int
    rightmost_block: int
    xi: HeightField
    zeta: HeightField


def discrepancy_witness(L: int, r: int, t: float, seed: int,
                        alpha: float = 2.0) -> WitnessReport:
    """Run the monotone-coupled pair from a common flat start at even
    offset r and report the discrepancy bookkeeping over [-alpha t, alpha t]."""
    if r < 0 or r % 2:
        raise ValueError("offset must be even and non-negative")
    window = int(np.ceil(alpha * t))
    xi_a, zeta_a, blocked, bl, br, dipped = K.monotone_pair_run(
        L, r, 1, float(t), K.useed(seed), window)
    xi = HeightField(xi_a, walled=True, offset=r)
    zeta = HeightField(zeta_a, walled=False, offset=r)
    return WitnessReport(bool(xi_a[0] != zeta_a[0]), bool(dipped),
                         int(blocked), int(bl), int(br), xi, zeta)
