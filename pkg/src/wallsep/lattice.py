"""Interface and exclusion state types and the exact mappings between them.

A height field lives on the ring Z/LZ (L even), takes integer values with
unit steps between neighbours, and satisfies the parity rule
height(x) + x even.  Its occupation image records the bond gradients:

    bit(x) = (1 - (h(x+1) - h(x))) / 2,

i.e. a site is occupied exactly when the interface steps *down* across
the bond (x, x+1).  This is the orientation under which a mark at site x
(which flips h(x) and swaps the contents of bond (x-1, x)) makes a
rightward particle hop across the distinguished bond (L-1, 0) raise the
height at the origin by two — the height/flux identity the rest of the
package relies on.  The flat field at even offset r maps to particles on
the odd sublattice.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np


@dataclass
class HeightField:
    """Heights on the periodic ring, optionally constrained to h >= 0."""

    heights: np.ndarray
    walled: bool = False
    offset: int = 0  # flat-start offset, kept for serialization round-trips

    def __post_init__(self):
        self.heights = np.asarray(self.heights, dtype=np.int64)

    @property
    def L(self) -> int:
        return self.heights.shape[0]

    def copy(self) -> "HeightField":
        return HeightField(self.heights.copy(), self.walled, self.offset)

    def validate(self) -> None:
        h = self.heights
        L = self.L
        if L < 4 or L % 2:
            raise ValueError(f"ring length must be even and >= 4, got {L}")
        grad = np.roll(h, -1) - h
        if not np.all(np.abs(grad) == 1):
            raise ValueError("neighbouring heights must differ by exactly 1")
        if np.any((h + np.arange(L)) % 2):
            raise ValueError("height parity broken: h(x) + x must be even")
        if self.walled and h.min() < 0:
            raise ValueError("walled field contains negative heights")


@dataclass
class OccupationField:
    """{0,1} occupations on the ring."""

    bits: np.ndarray

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=np.uint8)

    @property
    def L(self) -> int:
        return self.bits.shape[0]

    @property
    def particles(self) -> int:
        return int(self.bits.sum())

    def copy(self) -> "OccupationField":
        return OccupationField(self.bits.copy())


@dataclass(frozen=True)
class SiteDelta:
    """A proposed height move: the Laplacian of the field at one site."""

    site: int
    delta: int  # in {-2, 0, +2}


def new_flat(L: int, offset: int = 0, walled: bool = False) -> HeightField:
    """Flat zig-zag field h(x) = offset + (x mod 2).

    offset must be even and non-negative so the parity invariant holds and
    a walled field starts on or above the wall.
    """
    if L < 4 or L % 2:
        raise ValueError(f"ring length must be even and >= 4, got {L}")
    if offset < 0:
        raise ValueError("offset must be non-negative")
    if offset % 2:
        raise ValueError("offset must be even to keep h(x) + x even")
    h = offset + (np.arange(L, dtype=np.int64) & 1)
    return HeightField(h, walled=walled, offset=offset)


def laplacian(h: HeightField, x: int) -> int:
    """Discrete Laplacian h(x+1) - 2 h(x) + h(x-1), indices mod L."""
    hh = h.heights
    L = h.L
    return int(hh[(x + 1) % L] - 2 * hh[x % L] + hh[(x - 1) % L])


def site_delta(h: HeightField, x: int) -> SiteDelta:
    return SiteDelta(x % h.L, laplacian(h, x))


def height_to_occupation(h: HeightField) -> OccupationField:
    """Gradient image: bit(x) = 1 iff the height steps down across (x, x+1)."""
    grad = np.roll(h.heights, -1) - h.heights
    return OccupationField(((1 - grad) // 2).astype(np.uint8))


def occupation_to_height(eta: OccupationField, anchor: int,
                         walled: bool = False) -> HeightField:
    """Integrate gradients from h(0) = anchor: h(x+1) = h(x) + 1 - 2 bit(x).

    Rejects occupations whose particle number is not L/2 (the ring would
    not close) and odd anchors (parity).
    """
    L = eta.L
    if eta.particles != L // 2:
        raise ValueError(
            f"particle number {eta.particles} != L/2 = {L // 2}: ring cannot close")
    if anchor % 2:
        raise ValueError("anchor must be even (site-0 parity)")
    steps = 1 - 2 * eta.bits.astype(np.int64)
    h = np.empty(L, dtype=np.int64)
    h[0] = anchor
    h[1:] = anchor + np.cumsum(steps[:-1])
    return HeightField(h, walled=walled)


def serialize(h: HeightField) -> str:
    """Text form: one line ``L r walled`` then the L heights."""
    head = f"{h.L} {h.offset} {int(h.walled)}\n"
    return head + " ".join(str(int(v)) for v in h.heights) + "\n"


def deserialize(text: str) -> HeightField:
    buf = io.StringIO(text)
    L, r, walled = (int(v) for v in buf.readline().split())
    vals = [int(v) for v in buf.read().split()]
    if len(vals) != L:
        raise ValueError(f"expected {L} heights, found {len(vals)}")
    f = HeightField(np.array(vals, dtype=np.int64), walled=bool(walled), offset=r)
    f.validate()
    return f
