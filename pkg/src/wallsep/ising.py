"""Zero-temperature Ising interface on the rotated window and its exact
rate equivalence with the walled corner-flip process.

The original model lives on Z^2 with the plus phase below the main
diagonal, a positive field there, and single-spin-flip rates that vanish
at zero temperature except where exactly two of the four neighbours
disagree and the site lies on or above the diagonal.  The rotation
R(x, y) = (x + y, x - y) carries it to the even sublattice, where
neighbours sit diagonally and the flippable half becomes y <= 0.

Interface extraction uses height(x) = -max{y : spin(x, y) = -1}; taking
the minimum as in a literal reading would be -infinity because the minus
phase occupies a down-set.  With this convention the flat initial
condition maps to height(x) = x mod 2 and every rate-1/2 flip corresponds
one-to-one to a wall-process corner move, including the blocked moves:
a down move from height 1 would need the plus spin at y = +1 to flip,
which the flippable-half condition forbids, exactly as the wall does.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kernels import Stream
from .lattice import HeightField


def rotate(p: tuple[int, int]) -> tuple[int, int]:
    """R(x, y) = (x + y, x - y); doubles the squared length, image in the
    even sublattice."""
    x, y = p
    return (x + y, x - y)


def rotate_inverse(p: tuple[int, int]) -> tuple[int, int]:
    """R^{-1}(u, v) = ((u+v)/2, (u-v)/2); defined only for u + v even."""
    u, v = p
    if (u + v) % 2:
        raise ValueError(f"{p} is not on the even sublattice")
    return ((u + v) // 2, (u - v) // 2)


class SpinWindow:
    """Spins on the even sublattice, |x|, |y| <= W, with frozen flat
    extension outside; reachable states are column-monotone (minus spins
    fill a down-set in every column)."""

    def __init__(self, W: int, heights: np.ndarray | None = None):
        self.W = W
        size = 2 * W + 1
        if heights is None:
            heights = np.array([abs(x) % 2 for x in range(-W, W + 1)], np.int64)
        heights = np.asarray(heights, dtype=np.int64)
        if heights.shape != (size,):
            raise ValueError("need one height per window column")
        self.spin = np.zeros((size, size), np.int8)
        for x in range(-W, W + 1):
            top = -heights[x + W]  # highest minus row of the column
            for y in range(-W, W + 1):
                if (x + y) % 2 == 0:
                    self.spin[x + W, y + W] = -1 if y <= top else 1
        self._minus_top = -heights.copy()

    # -- site access -------------------------------------------------

    def in_window(self, x: int, y: int) -> bool:
        return abs(x) <= self.W and abs(y) <= self.W

    def sigma(self, x: int, y: int) -> int:
        """Spin value at any even-sublattice point; outside the window the
        frozen flat extension (columns) or the column's phase (rows)."""
        if (x + y) % 2:
            raise ValueError(f"({x},{y}) is not on the even sublattice")
        if abs(x) > self.W:
            return -1 if y <= -(abs(x) % 2) else 1
        if abs(y) > self.W:
            return -1 if y <= self._minus_top[x + self.W] else 1
        return int(self.spin[x + self.W, y + self.W])

    def heights(self) -> np.ndarray:
        return -self._minus_top

    def flip(self, x: int, y: int) -> None:
        if not self.in_window(x, y):
            raise ValueError("cannot flip a frozen spin outside the window")
        s = self.spin[x + self.W, y + self.W]
        self.spin[x + self.W, y + self.W] = -s
        top = self._minus_top[x + self.W]
        if s == -1 and y == top:
            self._minus_top[x + self.W] = top - 2
        elif s == 1 and y == top + 2:
            self._minus_top[x + self.W] = top + 2
        else:
            raise ValueError("flip would break column monotonicity")

    def dump_text(self) -> str:
        """Debug grid, highest row first; '.' marks odd-sublattice holes."""
        rows = []
        for y in range(self.W, -self.W - 1, -1):
            row = []
            for x in range(-self.W, self.W + 1):
                if (x + y) % 2:
                    row.append(".")
                else:
                    row.append("+" if self.spin[x + self.W, y + self.W] > 0 else "-")
            rows.append("".join(row))
        return "\n".join(rows)


def glauber_rate(sw: SpinWindow, x: int, y: int) -> float:
    """Zero-temperature flip rate at (x, y): 1/2 when exactly two diagonal
    neighbours disagree and the site lies in the flippable half y <= 0."""
    if not sw.in_window(x, y):
        raise ValueError(f"({x},{y}) outside the window: no rate defined")
    s = sw.sigma(x, y)
    disagree = sum(1 for dx in (-1, 1) for dy in (-1, 1)
                   if sw.sigma(x + dx, y + dy) != s)
    return 0.5 if (disagree == 2 and y <= 0) else 0.0


def spin_to_interface(sw: SpinWindow) -> HeightField:
    """Column heights -max{y : spin = -1}; raises on a non-monotone column.

    The result is a window restriction, not a periodic field; it is
    returned as a plain HeightField for the observable helpers and is not
    ring-validated.
    """
    W = sw.W
    heights = np.empty(2 * W + 1, np.int64)
    for x in range(-W, W + 1):
        col = [(y, sw.sigma(x, y)) for y in range(-W, W + 1) if (x + y) % 2 == 0]
        minus = [y for y, s in col if s == -1]
        if not minus:
            raise ValueError(f"column {x} has no minus spins in the window")
        top = max(minus)
        if any(s != (-1 if y <= top else 1) for y, s in col):
            raise ValueError(f"column {x} is not monotone")
        heights[x + W] = -top
    return HeightField(heights, walled=True)


@dataclass
class AuditReport:
    columns: list[int]
    mismatches: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def ising_vs_wall_rate_audit(sw: SpinWindow,
                             columns: list[int] | None = None) -> AuditReport:
    """Exact transition-structure comparison: per column the rate-1/2 spin
    flips must map one-to-one onto the wall process's allowed +-2 corner
    moves at rate 1/2, and no other window site may carry positive rate."""
    W = sw.W
    if columns is None:
        columns = list(range(-W + 1, W))
    h = sw.heights()
    report = AuditReport(columns=list(columns))

    def height(x: int) -> int:
        if abs(x) <= W:
            return int(h[x + W])
        return abs(x) % 2  # frozen flat extension

    for x in columns:
        lap = height(x + 1) - 2 * height(x) + height(x - 1)
        up_allowed = lap == 2
        down_allowed = lap == -2 and height(x) - 2 >= 0
        top = -height(x)
        up_rate = glauber_rate(sw, x, top)
        down_rate = glauber_rate(sw, x, top + 2) if abs(top + 2) <= W else 0.0
        if (up_rate == 0.5) != up_allowed:
            report.mismatches.append(
                f"column {x}: up flip rate {up_rate} vs wall move {up_allowed}")
        if (down_rate == 0.5) != down_allowed:
            report.mismatches.append(
                f"column {x}: down flip rate {down_rate} vs wall move {down_allowed}")
        for y in range(-W, W + 1):
            if (x + y) % 2 or y == top or y == top + 2:
                continue
            if glauber_rate(sw, x, y) > 0:
                report.mismatches.append(
                    f"column {x}: stray positive rate at y={y}")
    return report


def evolve_ising(sw: SpinWindow, t: float, seed: int) -> float:
    """Gillespie evolution of the window for time t; returns the time of
    the last applied event.  Candidate flips are the per-column interface
    spins; the audit separately certifies no other site carries rate."""
    stream = Stream(seed)
    now = 0.0
    W = sw.W
    while True:
        candidates = []
        for x in range(-W, W + 1):
            top = int(sw._minus_top[x + W])
            if top < -W + 2:
                raise RuntimeError(f"column {x} outgrew the window; raise W")
            for y in (top, top + 2):
                if abs(y) <= W and glauber_rate(sw, x, y) == 0.5:
                    candidates.append((x, y))
        if not candidates:
            return now
        total = 0.5 * len(candidates)
        step = stream.exponential(total)
        if now + step > t:
            return now
        now += step
        x, y = candidates[stream.randrange(len(candidates))]
        sw.flip(x, y)


def window_from_pattern(pattern, center: int, W: int) -> SpinWindow:
    """Window whose columns center-k .. center+k carry the width-(2k+1)
    height pattern, extended outward as flat zig-zags.

    The pattern must be a lattice path (unit steps) with heights whose
    parity matches the column parity.
    """
    pattern = [int(v) for v in pattern]
    half = len(pattern) // 2
    lo, hi = center - half, center + half
    arr = np.empty(2 * W + 1, np.int64)
    for x in range(-W, W + 1):
        if lo <= x <= hi:
            arr[x + W] = pattern[x - lo]
        elif x < lo:
            d = lo - x
            base = pattern[0]
            arr[x + W] = (base - d % 2) if base >= 1 else d % 2
        else:
            d = x - hi
            base = pattern[-1]
            arr[x + W] = (base - d % 2) if base >= 1 else d % 2
    for x in range(-W, W):
        if abs(arr[x + 1 + W] - arr[x + W]) != 1:
            raise ValueError("pattern does not extend to a lattice path")
    if any((arr[x + W] + x) % 2 for x in range(-W, W + 1)):
        raise ValueError("pattern parity does not match column parity")
    return SpinWindow(W, arr)
