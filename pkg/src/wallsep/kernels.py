"""Hot-loop lattice kernels (numba JIT).

Every replica owns a private splitmix64 stream whose seed is derived from
(master seed, replica index) by the mixing function `derive_seed`; a
trajectory is therefore a pure function of its 64-bit seed.  Sites are
drawn with an unbiased rejection step (plain mask when the ring length is
a power of two), event counts for continuous-time schedules with an exact
PTRS Poisson sampler.

Conventions shared with the object-level modules:

* a mark at site x flips height(x) by its discrete Laplacian and swaps the
  occupation/stirring contents of the bond (x-1, x), indices mod L;
* occupation bit(x) = 1 iff the height steps down across bond (x, x+1),
  so a rightward particle hop across a bond raises the height at the
  bond's right end by 2;
* the distinguished flux bond is (L-1, 0); the counter gains +1 when a
  particle hops L-1 -> 0 and -1 the other way;
* ring site s sits at signed position s when s < L/2 and s - L otherwise,
  which places the distinguished bond midpoint at -1/2.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange
from numba import int64, uint64

MASK64 = 0xFFFFFFFFFFFFFFFF
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


def derive_seed(master: int, index: int) -> int:
    """splitmix64 mix of master + (index+1)*golden-gamma, in pure Python.

    Matches the in-kernel derivation bit for bit; collision-free over any
    practical replica range (tested to 10**6).
    """
    z = (master + ((index + 1) * GAMMA & MASK64)) & MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return (z ^ (z >> 31)) & MASK64


def useed(seed: int) -> np.uint64:
    """Clamp a seed into the uint64 range numba kernels expect."""
    return np.uint64(int(seed) & MASK64)


def stream_u64(seed: int, n: int) -> np.ndarray:
    """First n outputs of the splitmix64 stream, bit-identical to the
    in-kernel sequence (vectorized)."""
    with np.errstate(over="ignore"):
        z = np.uint64(seed) + np.arange(1, n + 1, dtype=np.uint64) * np.uint64(GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
        return z ^ (z >> np.uint64(31))


class Stream:
    """Sequential Python view of the same splitmix64 stream."""

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * MIX1) & MASK64
        z = ((z ^ (z >> 27)) * MIX2) & MASK64
        return (z ^ (z >> 31)) & MASK64

    def u01(self) -> float:
        return (self.next_u64() >> 11) * 1.1102230246251565e-16

    def randrange(self, n: int) -> int:
        rem = (1 << 64) % n
        while True:
            u = self.next_u64()
            if u >= rem:
                return (u - rem) % n

    def exponential(self, rate: float) -> float:
        u = self.u01()
        while u <= 0.0:
            u = self.u01()
        return -math.log(u) / rate


@njit(uint64(uint64), inline="always", cache=True)
def _mix(z):
    z = (z ^ (z >> uint64(30))) * uint64(MIX1)
    z = (z ^ (z >> uint64(27))) * uint64(MIX2)
    return z ^ (z >> uint64(31))


@njit(uint64(uint64, uint64), inline="always", cache=True)
def _derive(master, index):
    return _mix(master + (index + uint64(1)) * uint64(GAMMA))


@njit(inline="always", cache=True)
def _next(state):
    state = state + uint64(GAMMA)
    return state, _mix(state)


@njit(inline="always", cache=True)
def _u01(state):
    state, u = _next(state)
    return state, (u >> uint64(11)) * 1.1102230246251565e-16


@njit(inline="always", cache=True)
def _site(state, L, mask):
    # mask == L-1 when L is a power of two, else 0 -> rejection + modulo
    state, u = _next(state)
    if mask != uint64(0):
        return state, int64(u & mask)
    lim = uint64(0) - uint64(L)
    rem = lim % uint64(L)  # 2^64 mod L
    while u < rem:
        state, u = _next(state)
    return state, int64(u % uint64(L))


@njit(cache=True)
def _poisson(state, lam):
    """Exact Poisson sample: Knuth product for small lam, PTRS rejection else."""
    if lam <= 0.0:
        return state, int64(0)
    if lam < 10.0:
        enlam = np.exp(-lam)
        k = int64(0)
        prod = 1.0
        while True:
            state, u = _u01(state)
            prod *= u
            if prod <= enlam:
                return state, k
            k += 1
    b = 0.931 + 2.53 * np.sqrt(lam)
    a = -0.059 + 0.02483 * b
    inv_alpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2.0)
    loglam = np.log(lam)
    while True:
        state, u = _u01(state)
        u -= 0.5
        state, v = _u01(state)
        us = 0.5 - abs(u)
        k = int64(np.floor((2.0 * a / us + b) * u + lam + 0.43))
        if us >= 0.07 and v <= vr:
            return state, k
        if k < 0 or (us < 0.013 and v > us):
            continue
        lhs = np.log(v) + np.log(inv_alpha) - np.log(a / (us * us) + b)
        rhs = k * loglam - lam - math.lgamma(k + 1.0)
        if lhs <= rhs:
            return state, k


@njit(cache=True)
def poisson_sample_array(lam, n, seed):
    """n Poisson(lam) draws from one stream (test support)."""
    out = np.empty(n, np.int64)
    state = uint64(seed)
    for i in range(n):
        state, k = _poisson(state, lam)
        out[i] = k
    return out


@njit(inline="always", cache=True)
def _mask_of(L):
    Lu = uint64(L)
    if Lu & (Lu - uint64(1)) == uint64(0):
        return Lu - uint64(1)
    return uint64(0)


# ---------------------------------------------------------------------------
# single-clock height dynamics (wall or free)
# ---------------------------------------------------------------------------


@njit(inline="always", cache=True)
def _flip(h, x, L, walled):
    xp = x + 1
    if xp == L:
        xp = 0
    xm = x - 1
    if xm < 0:
        xm = L - 1
    lap = h[xp] - 2 * h[x] + h[xm]
    if lap != 0:
        nh = h[x] + lap
        if (not walled) or nh >= 0:
            h[x] = nh


@njit(cache=True)
def height_run(h, walled, schedule, t, seed):
    """Evolve one height field in place; returns (actual_t, n_events).

    schedule 0: one uniform-site mark per step, time step 2/L (the
    discrete chain); schedule 1: Poisson(L*t/2) marks (continuous time).
    """
    L = h.shape[0]
    mask = _mask_of(L)
    state = uint64(seed)
    if schedule == 0:
        n = int64(np.floor(t * L / 2.0 + 1e-9))
        actual = 2.0 * n / L
    else:
        state, n = _poisson(state, 0.5 * L * t)
        actual = t
    for _ in range(n):
        state, x = _site(state, L, mask)
        _flip(h, x, L, walled)
    return actual, n


@njit(parallel=True, cache=True)
def height_obs_ensemble(L, walled, offset, schedule, times, n_rep, master_seed):
    """Per-replica height observables at checkpoint times.

    Returns (obs, guard): obs[rep, k] = (mean height over even sites,
    mean squared height over all sites, fraction of zero-height sites)
    at times[k]; guard[rep] = 1 if max|h| ever exceeded L/4 at a
    checkpoint (ring-approximation validity).
    """
    nchk = times.shape[0]
    obs = np.empty((n_rep, nchk, 3), np.float64)
    guard = np.zeros(n_rep, np.uint8)
    for rep in prange(n_rep):
        state = _derive(uint64(master_seed), uint64(rep))
        h = np.empty(L, np.int64)
        for x in range(L):
            h[x] = offset + (x & 1)
        mask = _mask_of(L)
        done = int64(0)
        prev_t = 0.0
        for k in range(nchk):
            if schedule == 0:
                target = int64(np.floor(times[k] * L / 2.0 + 1e-9))
                n = target - done
                done = target
            else:
                state, n = _poisson(state, 0.5 * L * (times[k] - prev_t))
                prev_t = times[k]
            for _ in range(n):
                state, x = _site(state, L, mask)
                _flip(h, x, L, walled)
            se = int64(0)
            ssq = int64(0)
            nz = int64(0)
            hmax = int64(0)
            for x in range(L):
                v = h[x]
                ssq += v * v
                if v == 0:
                    nz += 1
                if (x & 1) == 0:
                    se += v
                av = v if v >= 0 else -v
                if av > hmax:
                    hmax = av
            obs[rep, k, 0] = se / (L // 2)
            obs[rep, k, 1] = ssq / L
            obs[rep, k, 2] = nz / L
            if hmax > L // 4:
                guard[rep] = 1
    return obs, guard


@njit(parallel=True, cache=True)
def height_final_ensemble(L, walled, offset, schedule, t, n_rep, master_seed):
    """Final height fields of n_rep independent replicas (small L only)."""
    out = np.empty((n_rep, L), np.int16)
    for rep in prange(n_rep):
        state = _derive(uint64(master_seed), uint64(rep))
        h = np.empty(L, np.int64)
        for x in range(L):
            h[x] = offset + (x & 1)
        mask = _mask_of(L)
        if schedule == 0:
            n = int64(np.floor(t * L / 2.0 + 1e-9))
        else:
            state, n = _poisson(state, 0.5 * L * t)
        for _ in range(n):
            state, x = _site(state, L, mask)
            _flip(h, x, L, walled)
        for x in range(L):
            out[rep, x] = np.int16(h[x])
    return out


# ---------------------------------------------------------------------------
# two-clock (up/down) coupled pairs and the shared-site coupling
# ---------------------------------------------------------------------------


@njit(inline="always", cache=True)
def _flip_signed(h, x, L, walled, want_up):
    """Apply an up-mark (want_up) or down-mark to h at x."""
    xp = x + 1
    if xp == L:
        xp = 0
    xm = x - 1
    if xm < 0:
        xm = L - 1
    lap = h[xp] - 2 * h[x] + h[xm]
    if want_up:
        if lap > 0:
            h[x] = h[x] + lap
    else:
        if lap < 0:
            nh = h[x] + lap
            if (not walled) or nh >= 0:
                h[x] = nh


@njit(parallel=True, cache=True)
def monotone_pair_ensemble(L, r_lo, walled_lo, r_hi, walled_hi, schedule, t,
                           n_rep, master_seed):
    """Two processes driven by the same up/down mark streams.

    lo starts flat at r_lo, hi flat at r_hi (requires r_lo <= r_hi so the
    initial domination holds).  Returns per-replica violation bitmasks:
    bit 0 domination lo<=hi broken at some event, bit 1 a walled field
    went negative, bit 2 final gradient/parity invariant broken.
    schedule 0: t*L steps of (uniform site, fair coin), time step 1/L;
    schedule 1: Poisson(L*t) such events.
    """
    viol = np.zeros(n_rep, np.uint8)
    for rep in prange(n_rep):
        state = _derive(uint64(master_seed), uint64(rep))
        lo = np.empty(L, np.int64)
        hi = np.empty(L, np.int64)
        for x in range(L):
            lo[x] = r_lo + (x & 1)
            hi[x] = r_hi + (x & 1)
        mask = _mask_of(L)
        if schedule == 0:
            n = int64(np.floor(t * L + 1e-9))
        else:
            state, n = _poisson(state, float(L) * t)
        bad = np.uint8(0)
        for _ in range(n):
            state, x = _site(state, L, mask)
            state, u = _next(state)
            up = (u >> uint64(63)) != uint64(0)
            _flip_signed(lo, x, L, walled_lo, up)
            _flip_signed(hi, x, L, walled_hi, up)
            if lo[x] > hi[x]:
                bad |= 1
            if (walled_lo and lo[x] < 0) or (walled_hi and hi[x] < 0):
                bad |= 2
        for x in range(L):
            xp = x + 1
            if xp == L:
                xp = 0
            d = lo[xp] - lo[x]
            e = hi[xp] - hi[x]
            if d * d != 1 or e * e != 1:
                bad |= 4
            if ((lo[x] + x) & 1) != 0 or ((hi[x] + x) & 1) != 0:
                bad |= 4
        viol[rep] = bad
    return viol


@njit(cache=True)
def monotone_pair_evolve(lo, hi, walled_lo, walled_hi, schedule, t, seed):
    """Evolve two given height fields under shared up/down mark streams,
    in place.  Returns (violation mask as in monotone_pair_ensemble,
    actual time, n_events)."""
    L = lo.shape[0]
    mask = _mask_of(L)
    state = uint64(seed)
    if schedule == 0:
        n = int64(np.floor(t * L + 1e-9))
        actual = n / L
    else:
        state, n = _poisson(state, float(L) * t)
        actual = t
    bad = np.uint8(0)
    for _ in range(n):
        state, x = _site(state, L, mask)
        state, u = _next(state)
        up = (u >> uint64(63)) != uint64(0)
        _flip_signed(lo, x, L, walled_lo, up)
        _flip_signed(hi, x, L, walled_hi, up)
        if lo[x] > hi[x]:
            bad |= 1
        if (walled_lo and lo[x] < 0) or (walled_hi and hi[x] < 0):
            bad |= 2
    return bad, actual, n


@njit(cache=True)
def shared_pair_evolve(xi, zeta, t, seed):
    """Wall field xi and free field zeta updated at one shared uniform
    site sequence (discrete schedule, step 2/L).  Returns (actual, n)."""
    L = xi.shape[0]
    mask = _mask_of(L)
    state = uint64(seed)
    n = int64(np.floor(t * L / 2.0 + 1e-9))
    for _ in range(n):
        state, x = _site(state, L, mask)
        _flip(xi, x, L, True)
        _flip(zeta, x, L, False)
    return 2.0 * n / L, n


@njit(cache=True)
def monotone_pair_run(L, r, schedule, t, seed, window):
    """One coupled (wall, free) trajectory from a common flat start at r.

    Returns (xi, zeta, blocked, block_left, block_right, zeta_dipped):
    blocked = number of wall rejections, block_left/right = extreme signed
    positions where they happened (0 if none), zeta_dipped = 1 if the free
    field went below 0 at a signed position within [-window, window].
    """
    state = uint64(seed)
    xi = np.empty(L, np.int64)
    zeta = np.empty(L, np.int64)
    for x in range(L):
        xi[x] = r + (x & 1)
        zeta[x] = r + (x & 1)
    mask = _mask_of(L)
    if schedule == 0:
        n = int64(np.floor(t * L + 1e-9))
    else:
        state, n = _poisson(state, float(L) * t)
    blocked = int64(0)
    bl = int64(0)
    br = int64(0)
    dipped = np.uint8(0)
    half = L // 2
    for _ in range(n):
        state, x = _site(state, L, mask)
        state, u = _next(state)
        up = (u >> uint64(63)) != uint64(0)
        sp = x if x < half else x - L
        _flip_signed(zeta, x, L, False, up)
        if zeta[x] < 0 and -window <= sp <= window:
            dipped = np.uint8(1)
        if not up:
            xp = x + 1
            if xp == L:
                xp = 0
            xm = x - 1
            if xm < 0:
                xm = L - 1
            lap = xi[xp] - 2 * xi[x] + xi[xm]
            if lap < 0 and xi[x] + lap < 0:
                blocked += 1
                if blocked == 1 or sp < bl:
                    bl = sp
                if blocked == 1 or sp > br:
                    br = sp
        _flip_signed(xi, x, L, True, up)
    return xi, zeta, blocked, bl, br, dipped


@njit(parallel=True, cache=True)
def shared_pair_ensemble(L, offset, t, n_rep, master_seed):
    """Wall and free fields updated at the identical uniform site sequence
    (the discrete-chain coupling).  Returns int16 fields [rep, 0/1, x]
    with 0 = wall, 1 = free."""
    out = np.empty((n_rep, 2, L), np.int16)
    for rep in prange(n_rep):
        state = _derive(uint64(master_seed), uint64(rep))
        xi = np.empty(L, np.int64)
        zeta = np.empty(L, np.int64)
        for x in range(L):
            xi[x] = offset + (x & 1)
            zeta[x] = offset + (x & 1)
        mask = _mask_of(L)
        n = int64(np.floor(t * L / 2.0 + 1e-9))
        for _ in range(n):
            state, x = _site(state, L, mask)
            _flip(xi, x, L, True)
            _flip(zeta, x, L, False)
        for x in range(L):
            out[rep, 0, x] = np.int16(xi[x])
            out[rep, 1, x] = np.int16(zeta[x])
    return out


# ---------------------------------------------------------------------------
# exclusion process: flux-only ensembles and fully instrumented runs
# ---------------------------------------------------------------------------


@njit(parallel=True, cache=True)
def flux_ensemble(L, init_mode, rho_threshold, times, n_rep, master_seed):
    """Continuous-time exclusion flux at the distinguished bond.

    init_mode 0: flat start (particles on odd sites, the gradient image of
    the flat interface); init_mode 1: i.i.d. Bernoulli occupations, site
    occupied iff the stream's u64 < rho_threshold.
    Returns J[rep, k] = counter value at times[k].
    """
    nchk = times.shape[0]
    J = np.empty((n_rep, nchk), np.int64)
    for rep in prange(n_rep):
        state = _derive(uint64(master_seed), uint64(rep))
        bits = np.empty(L, np.uint8)
        if init_mode == 0:
            for x in range(L):
                bits[x] = x & 1
        else:
            for x in range(L):
                state, u = _next(state)
                bits[x] = 1 if u < uint64(rho_threshold) else 0
        mask = _mask_of(L)
        j = int64(0)
        prev_t = 0.0
        for k in range(nchk):
            state, n = _poisson(state, 0.5 * L * (times[k] - prev_t))
            prev_t = times[k]
            for _ in range(n):
                state, x = _site(state, L, mask)
                xm = x - 1
                if xm < 0:
                    xm = L - 1
                a = bits[xm]
                b = bits[x]
                if a != b:
                    bits[xm] = b
                    bits[x] = a
                    if x == 0:
                        j += 1 if a == 1 else -1
            J[rep, k] = j
    return J


@njit(parallel=True, cache=True)
def flux_allbonds_ensemble(L, init_mode, rho_threshold, times, n_rep, master_seed):
    """Continuous-time exclusion with a signed crossing counter at every bond.

    Bond b is the one swapped by marks at site b, i.e. (b-1, b); rightward
    hops count +1.  All L counters have the same law as the distinguished
    one up to the parity-dependent sign of their mean, which lets the
    caller pool them as translation-equivalent flux samples.

    Returns sums[rep, k] = (sum_b J_b, sum_b J_b^2, sum over even b,
    sum of squares over even b) at times[k].
    """
    nchk = times.shape[0]
    sums = np.empty((n_rep, nchk, 4), np.float64)
    for rep in prange(n_rep):
        state = _derive(uint64(master_seed), uint64(rep))
        bits = np.empty(L, np.uint8)
        if init_mode == 0:
            for x in range(L):
                bits[x] = x & 1
        else:
            for x in range(L):
                state, u = _next(state)
                bits[x] = 1 if u < uint64(rho_threshold) else 0
        J = np.zeros(L, np.int64)
        mask = _mask_of(L)
        prev_t = 0.0
        for k in range(nchk):
            state, n = _poisson(state, 0.5 * L * (times[k] - prev_t))
            prev_t = times[k]
            for _ in range(n):
                state, x = _site(state, L, mask)
                xm = x - 1
                if xm < 0:
                    xm = L - 1
                a = bits[xm]
                b = bits[x]
                if a != b:
                    bits[xm] = b
                    bits[x] = a
                    J[x] += 1 if a == 1 else -1
            s1 = int64(0)
            s2 = int64(0)
            e1 = int64(0)
            e2 = int64(0)
            for b2 in range(L):
                v = J[b2]
                s1 += v
                s2 += v * v
                if (b2 & 1) == 0:
                    e1 += v
                    e2 += v * v
            sums[rep, k, 0] = s1
            sums[rep, k, 1] = s2
            sums[rep, k, 2] = e1
            sums[rep, k, 3] = e2
    return sums


@njit(cache=True)
def _sep_event(bits, pos, lab, disp, h, x, L, track_heights):
    """One mark at site x: swap bond (x-1, x) contents, labels, heights."""
    xm = x - 1
    if xm < 0:
        xm = L - 1
    a = lab[xm]
    b = lab[x]
    lab[xm] = b
    lab[x] = a
    pos[a] = x
    pos[b] = xm
    disp[a] += 1
    disp[b] -= 1
    va = bits[xm]
    vb = bits[x]
    dj = int64(0)
    if va != vb:
        bits[xm] = vb
        bits[x] = va
        if x == 0:
            dj = int64(1) if va == 1 else int64(-1)
    if track_heights:
        _flip(h, x, L, False)
    return dj


@njit(cache=True)
def sep_run(bits, pos, lab, disp, h, track_heights, t, seed):
    """Continuous-time exclusion for time t, all state updated in place.

    Returns (J increment over this call, max |disp| seen, n_events).
    """
    L = bits.shape[0]
    mask = _mask_of(L)
    state = uint64(seed)
    state, n = _poisson(state, 0.5 * L * t)
    j = int64(0)
    dmax = int64(0)
    for _ in range(n):
        state, x = _site(state, L, mask)
        j += _sep_event(bits, pos, lab, disp, h, x, L, track_heights)
        xm = x - 1
        if xm < 0:
            xm = L - 1
        a = disp[lab[x]]
        if a < 0:
            a = -a
        b = disp[lab[xm]]
        if b < 0:
            b = -b
        if b > a:
            a = b
        if a > dmax:
            dmax = a
    return j, dmax, n


@njit(inline="always", cache=True)
def _signed_pos(s, L):
    return s if s < L // 2 else s - L


@njit(cache=True)
def _identity_checks(L, bits, pos, lab, disp, h, offset, j):
    """Bit-level identity suite on the current state; returns (viol, H, I, Hp).

    viol bits: 0 duality, 1 J != H-I, 2 |H'-I| > 1, 3 height-flux identity,
    4 bijectivity, 5 gradient/parity/occupation consistency.
    """
    viol = np.uint16(0)
    H = int64(0)
    I = int64(0)
    Hp = int64(0)
    for l in range(L):
        if (l & 1) == 1:  # flat start puts particles on odd sites
            tp = _signed_pos(l, L) + disp[l]
            if _signed_pos(l, L) < 0:
                if tp >= 0:
                    H += 1
            else:
                if tp < 0:
                    I += 1
                if tp < -1:
                    Hp += 1
    if j != H - I:
        viol |= 2
    d = Hp - I
    if d < -1 or d > 1:
        viol |= 4
    if h[0] - offset != 2 * j:
        viol |= 8
    for y in range(L):
        if lab[pos[y]] != y or pos[lab[y]] != y:
            viol |= 16
        if bits[y] != (lab[y] & 1):  # duality: eta_t(y) = eta_0(D_t(y))
            viol |= 1
    npart = int64(0)
    for x in range(L):
        xp = x + 1
        if xp == L:
            xp = 0
        g = h[xp] - h[x]
        if g * g != 1:
            viol |= 32
        if ((h[x] + x) & 1) != 0:
            viol |= 32
        if bits[x] != (1 - g) // 2:
            viol |= 32
        npart += bits[x]
    if npart != L // 2:
        viol |= 32
    return viol, H, I, Hp


@njit(parallel=True, cache=True)
def sep_identity_ensemble(L, t, n_rep, master_seed):
    """Exclusion + coupled free heights from one mark stream per replica;
    the exact-identity suite is evaluated at t/2 and t.

    Returns (viol[rep], guard[rep], JHI[rep] = (J, H, I, H')).
    guard = 1 when max |disp| exceeded L/2 - 2 (winding exactness limit).
    """
    viol = np.zeros(n_rep, np.uint16)
    guard = np.zeros(n_rep, np.uint8)
    JHI = np.zeros((n_rep, 4), np.int64)
    for rep in prange(n_rep):
        seed = _derive(uint64(master_seed), uint64(rep))
        bits = np.empty(L, np.uint8)
        pos = np.empty(L, np.int64)
        lab = np.empty(L, np.int64)
        disp = np.zeros(L, np.int64)
        h = np.empty(L, np.int64)
        for x in range(L):
            bits[x] = x & 1
            pos[x] = x
            lab[x] = x
            h[x] = x & 1
        j = int64(0)
        dmax = int64(0)
        v = np.uint16(0)
        for half in range(2):
            dj, dm, _ = sep_run(bits, pos, lab, disp, h, True, 0.5 * t,
                                _mix(seed + uint64(half)))
            j += dj
            if dm > dmax:
                dmax = dm
            vv, H, I, Hp = _identity_checks(L, bits, pos, lab, disp, h, 0, j)
            v |= vv
        viol[rep] = v
        if dmax > L // 2 - 2:
            guard[rep] = 1
        JHI[rep, 0] = j
        JHI[rep, 1] = H
        JHI[rep, 2] = I
        JHI[rep, 3] = Hp
    return viol, guard, JHI


@njit(parallel=True, cache=True)
def sep_smallring_ensemble(L, t, n_rep, master_seed):
    """Final occupations and flux of small-ring exclusion replicas."""
    bits_out = np.empty((n_rep, L), np.uint8)
    J = np.empty(n_rep, np.int16)
    for rep in prange(n_rep):
        state = _derive(uint64(master_seed), uint64(rep))
        bits = np.empty(L, np.uint8)
        for x in range(L):
            bits[x] = x & 1
        mask = _mask_of(L)
        state, n = _poisson(state, 0.5 * L * t)
        j = int64(0)
        for _ in range(n):
            state, x = _site(state, L, mask)
            xm = x - 1
            if xm < 0:
                xm = L - 1
            a = bits[xm]
            b = bits[x]
            if a != b:
                bits[xm] = b
                bits[x] = a
                if x == 0:
                    j += 1 if a == 1 else -1
        for x in range(L):
            bits_out[rep, x] = bits[x]
        J[rep] = np.int16(j)
    return bits_out, J


@njit(parallel=True, cache=True)
def free_origin_ensemble(L, t, n_rep, master_seed):
    """Height change at the origin of the free process (Poisson marks)."""
    out = np.empty(n_rep, np.int32)
    for rep in prange(n_rep):
        state = _derive(uint64(master_seed), uint64(rep))
        h = np.empty(L, np.int64)
        for x in range(L):
            h[x] = x & 1
        mask = _mask_of(L)
        state, n = _poisson(state, 0.5 * L * t)
        for _ in range(n):
            state, x = _site(state, L, mask)
            _flip(h, x, L, False)
        out[rep] = np.int32(h[0])
    return out
