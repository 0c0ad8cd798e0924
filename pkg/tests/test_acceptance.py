"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line
with the measured numbers (run with ``pytest -s`` to see them live).

Criterion 9 is implemented exactly as stated; at t=1024 the crossing-count
tails put no measurable mass beyond the first threshold (the exact oracles
bound the exceedance probabilities around 1e-60), so the strict empirical
decrease cannot hold at 1e5 replicas and the test fails honestly rather
than being weakened.
"""

import math

import numpy as np
import pytest

from wallsep import kernels as K
from wallsep import oracle as O
from wallsep.exclusion import pooled_flux_variance, ring_size_ok
from wallsep.ising import (SpinWindow, evolve_ising, ising_vs_wall_rate_audit,
                           window_from_pattern)
from wallsep.observables import exponent_fit, log_fit, replica_slope_ci

INV_SQRT_PI = 1.0 / math.sqrt(math.pi)            # 0.5641895835477563
INV_4_SQRT_PI = 0.25 * INV_SQRT_PI                # 0.1410473958869391
INV_2_SQRT_2PI = 0.5 / math.sqrt(2.0 * math.pi)   # 0.19947114020071635
RHO_QUARTER = 0.1875 * math.sqrt(2.0 / math.pi)   # rho(1-rho)sqrt(2/pi), rho=1/4

MASTER = 20250810


def _report(num: int, name: str, ok: bool, detail: str) -> None:
    print(f"\nACCEPTANCE {num} ({name}): {'PASS' if ok else 'FAIL'} — {detail}")


# -- criterion 1: bit-level identities --------------------------------------


def test_criterion_1_exact_identities():
    n = 10_000
    viol, guard, JHI = K.sep_identity_ensemble(64, 32.0, n, MASTER + 1)
    coup = K.monotone_pair_ensemble(64, 0, False, 0, True, 1, 32.0, n,
                                    MASTER + 2)
    basic = K.monotone_pair_ensemble(64, 0, True, 2, True, 1, 32.0, n,
                                     MASTER + 3)
    bad_ident = int(np.count_nonzero(viol))
    bad_guard = int(np.count_nonzero(guard))
    bad_coup = int(np.count_nonzero(coup))
    bad_basic = int(np.count_nonzero(basic))
    ok = bad_ident == 0 and bad_guard == 0 and bad_coup == 0 and bad_basic == 0
    _report(1, "exact identities", ok,
            f"{n} seeds, L=64, t=32: identity violations {bad_ident}, "
            f"winding-guard trips {bad_guard}, domination violations "
            f"{bad_coup}, basic-coupling violations {bad_basic}; "
            f"J range [{JHI[:, 0].min()}, {JHI[:, 0].max()}]")
    assert ok


# -- criterion 2: small-ring oracle equivalence ------------------------------


def test_criterion_2_small_ring_oracle():
    n = 1_000_000
    bits, J = K.sep_smallring_ensemble(6, 1.0, n, MASTER + 4)
    ring = O.exact_ring_transient(6, 1.0)
    p_exact = ring.occupation_marginals()
    p_mc = bits.mean(axis=0)
    tv = float(np.abs(p_mc - p_exact).max())
    J = J.astype(np.float64)
    mean_mc = float(J.mean())
    se_mean = float(J.std(ddof=1)) / math.sqrt(n)
    var_mc = float(J.var(ddof=1))
    m4 = float(np.mean((J - mean_mc) ** 4))
    se_var = math.sqrt(max(m4 - var_mc ** 2 * (n - 3) / (n - 1), 0.0) / n)
    e_ok = abs(mean_mc - ring.flux_mean()) <= 2.576 * se_mean
    v_ok = abs(var_mc - ring.flux_variance()) <= 2.576 * se_var
    ok = tv <= 0.01 and e_ok and v_ok
    _report(2, "small-ring oracle", ok,
            f"site-marginal TV {tv:.2e} (<=0.01); E J {mean_mc:.5f} vs "
            f"{ring.flux_mean():.5f} ({'in' if e_ok else 'out of'} 99% CI); "
            f"V J {var_mc:.5f} vs {ring.flux_variance():.5f} "
            f"({'in' if v_ok else 'out of'} 99% CI)")
    assert ok


# -- criteria 3-4: flux-variance constants -----------------------------------


def test_criterion_3_flux_variance_flat():
    # exact-oracle comparison at t=20
    assert ring_size_ok(512, 20.0)
    sums = K.flux_allbonds_ensemble(512, 0, 0, np.array([20.0]), 100_000,
                                    MASTER + 5)
    pv20 = pooled_flux_variance(sums[:, 0, :], 512, 20.0, True, level=0.99)
    exact20 = O.flux_variance_exact(20.0, rel_tol=1e-5).value
    part1 = pv20.ci_low <= exact20 <= pv20.ci_high

    # trend toward the limiting constant at L = 2^14
    L = 1 << 14
    times = np.array([256.0, 1024.0, 4096.0])
    assert ring_size_ok(L, float(times[-1]))
    sums2 = K.flux_allbonds_ensemble(L, 0, 0, times, 2000, MASTER + 6)
    ratios = [pooled_flux_variance(sums2[:, k, :], L, float(t), True).estimate
              / math.sqrt(t) for k, t in enumerate(times)]
    decreasing = ratios[0] > ratios[1] > ratios[2] > INV_4_SQRT_PI * 0.995
    within = abs(ratios[2] - INV_4_SQRT_PI) / INV_4_SQRT_PI <= 0.08
    ok = part1 and decreasing and within
    _report(3, "flat-start flux variance", ok,
            f"t=20: MC {pv20.estimate:.5f} CI [{pv20.ci_low:.5f}, "
            f"{pv20.ci_high:.5f}] vs exact {exact20:.5f} "
            f"({'in' if part1 else 'out'}); V/sqrt(t) at t=256,1024,4096 = "
            f"{ratios[0]:.5f} > {ratios[1]:.5f} > {ratios[2]:.5f} "
            f"-> {INV_4_SQRT_PI:.5f} (last within "
            f"{abs(ratios[2] - INV_4_SQRT_PI) / INV_4_SQRT_PI * 100:.2f}%)")
    assert ok


def test_criterion_4_flux_variance_product():
    L = 1 << 12
    t = 4096.0
    assert ring_size_ok(L, t)
    results = {}
    for rho, idx in ((0.5, 7), (0.25, 8)):
        thresh = np.uint64(int(round(rho * 2.0 ** 64)))
        sums = K.flux_allbonds_ensemble(L, 1, thresh, np.array([t]), 2000,
                                        MASTER + idx)
        pv = pooled_flux_variance(sums[:, 0, :], L, t, flat_start=False)
        results[rho] = pv.estimate / math.sqrt(t)
    dev_half = abs(results[0.5] - INV_2_SQRT_2PI) / INV_2_SQRT_2PI
    dev_quarter = abs(results[0.25] - RHO_QUARTER) / RHO_QUARTER
    ok = dev_half <= 0.08 and dev_quarter <= 0.10
    _report(4, "product-start flux variance", ok,
            f"rho=1/2: {results[0.5]:.5f} vs {INV_2_SQRT_2PI:.5f} "
            f"({dev_half * 100:.2f}% <= 8%); rho=1/4: {results[0.25]:.5f} vs "
            f"{RHO_QUARTER:.5f} ({dev_quarter * 100:.2f}% <= 10%)")
    assert ok


# -- criteria 5-6: interface observables at scale ----------------------------


@pytest.fixture(scope="module")
def free_run():
    times = np.array([1024.0, 4096.0, 16384.0])
    obs, guard = K.height_obs_ensemble(1 << 17, False, 0, 0, times, 8,
                                       MASTER + 9)
    assert not guard.any()
    return times, obs


@pytest.fixture(scope="module")
def wall_run():
    times = np.array([2.0 ** k for k in range(8, 15)])
    obs, guard = K.height_obs_ensemble(1 << 17, True, 0, 0, times, 16,
                                       MASTER + 10)
    assert not guard.any()
    return times, obs


def test_criterion_5_free_process_variance(free_run):
    times, obs = free_run
    ratios = obs[:, :, 1].mean(axis=0) / np.sqrt(times)
    devs = np.abs(ratios - INV_SQRT_PI) / INV_SQRT_PI
    ok = bool((devs <= 0.05).all())
    _report(5, "free-process variance", ok,
            "t^{-1/2} mean zeta^2 at t=2^10,2^12,2^14: "
            + ", ".join(f"{r:.5f} ({d * 100:.2f}%)"
                        for r, d in zip(ratios, devs))
            + f" vs {INV_SQRT_PI:.5f} (tol 5%)")
    assert ok


def test_criterion_6a_origin_height_exponent(wall_run):
    times, obs = wall_run
    mean_origin = obs[:, :, 0].mean(axis=0)
    slope_h = exponent_fit(list(zip(times, mean_origin))).b
    ok = 0.20 <= slope_h <= 0.35
    _report(6, "wall scaling (a): origin-height exponent", ok,
            f"log-log slope of mean height at the origin over t=2^8..2^14: "
            f"{slope_h:.4f}, window [0.20, 0.35]")
    assert ok


def test_criterion_6b_log_law_coefficient(wall_run):
    times, obs = wall_run
    per_rep = [[(t, obs[r, k, 1] / math.sqrt(t)) for k, t in enumerate(times)]
               for r in range(obs.shape[0])]
    b_mean, b_lo, b_hi = replica_slope_ci(per_rep, log_fit, level=0.95)
    ok = b_mean > 0 and b_lo > 0
    _report(6, "wall scaling (b): squared-height log law", ok,
            f"slope of t^(-1/2) mean height^2 against log t: {b_mean:.4f}, "
            f"replica-batched 95% CI [{b_lo:.4f}, {b_hi:.4f}] "
            f"{'excludes' if ok else 'contains'} 0")
    assert ok


def test_criterion_6c_wall_layer_exponent(wall_run):
    # stated window [-0.6, -0.4] targets ~t^{-1/2}; the simulated fraction
    # of wall contacts decays like t^{-3/4} and steeper (consistent with
    # the quadratically vanishing scaled density at the wall), so this
    # criterion fails at its stated parameters; see the decisions notes
    times, obs = wall_run
    f0 = obs[:, :, 2].mean(axis=0)
    slope_f = exponent_fit(list(zip(times, f0))).b
    ok = -0.6 <= slope_f <= -0.4
    _report(6, "wall scaling (c): zero-height fraction exponent", ok,
            f"log-log slope of f_t(0) over t=2^8..2^14: {slope_f:.4f}, "
            f"window [-0.6, -0.4]; measured decay is compatible with "
            f"t^(-3/4) (quadratic vanishing of the wall-layer density), "
            f"not t^(-1/2)")
    assert ok


def test_figure_one_reduced_scale(free_run, wall_run):
    # reduced-scale reproduction: the free curve sits flat near the exact
    # constant while the wall curve increases
    ftimes, fobs = free_run
    free_curve = fobs[:, :, 1].mean(axis=0) / np.sqrt(ftimes)
    wtimes, wobs = wall_run
    wall_curve = wobs[:, :, 1].mean(axis=0) / np.sqrt(wtimes)
    assert np.all(np.abs(free_curve - INV_SQRT_PI) / INV_SQRT_PI < 0.05)
    assert wall_curve[-1] > wall_curve[0]
    assert np.all(wall_curve > free_curve[0])


# -- criterion 7: pair parity and the single-walk constant -------------------


def test_criterion_7_pair_parity_and_v_term():
    snap = O.pair_distribution(0, 1, 50.0, which="V")
    p_even, p_odd = snap.parity_mass(0), snap.parity_mass(1)
    parity_ok = abs(p_even - 0.25) <= 0.02 and abs(p_odd - 0.25) <= 0.02
    v400 = O.v_term_exact(400.0) / math.sqrt(400.0)
    target = 1.0 / (2.0 * math.sqrt(math.pi))
    v_ok = abs(v400 - target) / target <= 0.02
    ok = parity_ok and v_ok
    _report(7, "pair parity / walk constant", ok,
            f"P(A_y) at t=50: even {p_even:.4f}, odd {p_odd:.4f} "
            f"(0.25 +- 0.02); V-term/sqrt(t) at t=400: {v400:.6f} vs "
            f"{target:.6f} ({abs(v400 - target) / target * 100:.3f}% <= 2%)")
    assert ok


# -- criterion 8: Ising equivalence ------------------------------------------


def test_criterion_8_ising_equivalence():
    mism = []
    n_pat = 0
    for b in range(0, 5):
        for a in (b - 1, b + 1):
            for c in (b - 1, b + 1):
                if min(a, c) < 0 or max(a, b, c) > 4:
                    continue
                center = 0 if b % 2 == 0 else 1
                sw = window_from_pattern([a, b, c], center, 8)
                mism += ising_vs_wall_rate_audit(sw, [center]).mismatches
                n_pat += 1
    n_states = 0
    for s in range(100):
        sw = SpinWindow(14)
        last = 0.0
        for chunk in range(10):
            last = evolve_ising(sw, 0.8, K.derive_seed(MASTER + 11,
                                                       100 * s + chunk))
            mism += ising_vs_wall_rate_audit(sw, list(range(-4, 5))).mismatches
            n_states += 1
    ok = not mism and n_states >= 1000
    _report(8, "Ising rate equivalence", ok,
            f"{n_pat} exhaustive width-3 patterns and {n_states} simulated "
            f"reachable states: {len(mism)} mismatches")
    assert ok


# -- criterion 9: tail-bound thresholds (fails honestly) ----------------------


def test_criterion_9_tail_thresholds():
    t, L, n = 1024.0, 512, 100_000
    assert ring_size_ok(L, t)
    J = K.flux_ensemble(L, 0, 0, np.array([t]), n, MASTER + 12)[:, 0]
    thresholds = [k * t ** 0.25 * math.log(t) for k in (1, 2, 3)]
    probs = [float((np.abs(J) > c).mean()) for c in thresholds]
    ok = probs[0] > probs[1] > probs[2]
    _report(9, "tail thresholds", ok,
            f"P(|J|>K t^0.25 log t) at t=1024, K=1,2,3: "
            f"{probs[0]:.2e}, {probs[1]:.2e}, {probs[2]:.2e} "
            f"(thresholds {thresholds[0]:.1f}, {thresholds[1]:.1f}, "
            f"{thresholds[2]:.1f}; sample sd of J is "
            f"{float(J.std(ddof=1)):.2f}, so the thresholds sit ~18+ sample "
            f"sds out and no strict ordering is measurable)")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v", "-s"]))
