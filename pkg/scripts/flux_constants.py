#!/usr/bin/env python3
"""Flux-variance constants: Monte Carlo against the exact values.

Sweeps Var J_t / sqrt(t) for the flat start and for product starts, prints
the limiting constants next to the estimates, and cross-checks one small t
against the exact lattice oracle.

Example:
    python scripts/flux_constants.py --replicas 2000 --seed 7
"""

import argparse
import math

import numpy as np

from wallsep import kernels as K
from wallsep import oracle as O
from wallsep.exclusion import pooled_flux_variance, ring_size_ok


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--L", type=int, default=1 << 13)
    ap.add_argument("--times", default="256,1024,4096")
    ap.add_argument("--replicas", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--t-exact", type=float, default=20.0)
    args = ap.parse_args()

    times = np.array([float(v) for v in args.times.split(",")])
    if not ring_size_ok(args.L, float(times[-1])):
        raise SystemExit("L too small for the largest time; enlarge --L")

    fv = O.flux_variance_exact(args.t_exact, rel_tol=1e-5)
    sums = K.flux_allbonds_ensemble(512, 0, 0, np.array([args.t_exact]),
                                    50_000, args.seed)
    pv = pooled_flux_variance(sums[:, 0, :], 512, args.t_exact, True)
    print(f"exact Var J at t={args.t_exact:g}: {fv.value:.6f} "
          f"(walk term {fv.v_term:.6f}, pair term {fv.e_term:.6f})")
    print(f"MC    Var J at t={args.t_exact:g}: {pv.estimate:.6f} "
          f"99% CI [{pv.ci_low:.6f}, {pv.ci_high:.6f}]")

    print("\nflat start, Var J / sqrt(t):")
    sums = K.flux_allbonds_ensemble(args.L, 0, 0, times, args.replicas,
                                    args.seed + 1)
    for k, t in enumerate(times):
        r = pooled_flux_variance(sums[:, k, :], args.L, float(t), True)
        print(f"  t={int(t):6d}: {r.estimate / math.sqrt(t):.5f}"
              f"   (limit 1/(4 sqrt(pi)) = {0.25 / math.sqrt(math.pi):.5f})")

    for rho in (0.5, 0.25):
        print(f"\nproduct start rho={rho}, Var J / sqrt(t):")
        thresh = np.uint64(int(round(rho * 2.0 ** 64)))
        sums = K.flux_allbonds_ensemble(args.L, 1, thresh, times,
                                        args.replicas, args.seed + 2)
        limit = rho * (1 - rho) * math.sqrt(2.0 / math.pi)
        for k, t in enumerate(times):
            r = pooled_flux_variance(sums[:, k, :], args.L, float(t), False)
            print(f"  t={int(t):6d}: {r.estimate / math.sqrt(t):.5f}"
                  f"   (limit rho(1-rho)sqrt(2/pi) = {limit:.5f})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
