"""Command-line interface: run experiments, emit oracle fixtures, audit the
Ising equivalence, and run the quick invariant self-test."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np


def _add_run(sub):
    p = sub.add_parser("run", help="run a configured experiment")
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--process", choices=("wall", "free", "exclusion",
                                         "coupled-monotone", "coupled-shared",
                                         "ising"))
    p.add_argument("--L", type=int)
    p.add_argument("--t", help="comma-separated checkpoint times")
    p.add_argument("--replicas", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--schedule", choices=("discrete", "continuous"))
    p.add_argument("--init", help="flat:<even r> or product:<rho>")
    p.add_argument("--observables", help="comma-separated observable names")
    p.add_argument("--out", help="output directory")


def _cmd_run(args) -> int:
    from .harness import ExperimentConfig, config_from_strings, \
        parse_config_file, run

    cfg = parse_config_file(args.config) if args.config else ExperimentConfig()
    overrides = {k: v for k, v in (
        ("process", args.process), ("L", args.L), ("t", args.t),
        ("replicas", args.replicas), ("seed", args.seed),
        ("schedule", args.schedule), ("init", args.init),
        ("observables", args.observables), ("out", args.out),
    ) if v is not None}
    cfg = config_from_strings({k: str(v) for k, v in overrides.items()}, cfg)
    manifest = run(cfg)
    print(f"wrote {len(manifest.files)} files to {cfg.out or 'wallsep_out'} "
          f"in {manifest.wall_clock_s:.1f}s")
    for name in manifest.files:
        print(" ", name)
    return 0


def _add_oracle(sub):
    p = sub.add_parser("oracle", help="emit exact oracle fixtures as CSV")
    p.add_argument("what", choices=("walk", "vterm", "fluxvar", "ring", "pair"))
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--L", type=int, default=6)
    p.add_argument("--i", type=int, default=0)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--which", choices=("U", "V"), default="V")
    p.add_argument("--out", help="CSV file (default stdout)")


def _cmd_oracle(args) -> int:
    from . import oracle as O

    lines = []
    if args.what == "walk":
        pmf = O.walk_pmf(args.t)
        lines.append("k,p")
        for k in range(-pmf.M, pmf.M + 1):
            lines.append(f"{k},{pmf.at(k):.12g}")
    elif args.what == "vterm":
        v = O.v_term_exact(args.t)
        lines.append("t,v_term,v_over_sqrt_t")
        lines.append(f"{args.t:.12g},{v:.12g},{v / max(args.t, 1e-300) ** 0.5:.12g}")
    elif args.what == "fluxvar":
        fv = O.flux_variance_exact(args.t)
        lines.append("t,var_J,v_term,e_term,panels")
        lines.append(f"{args.t:.12g},{fv.value:.12g},{fv.v_term:.12g},"
                     f"{fv.e_term:.12g},{fv.panels}")
    elif args.what == "ring":
        ring = O.exact_ring_transient(args.L, args.t)
        lines.append("site,occupation_marginal")
        for x, p in enumerate(ring.occupation_marginals()):
            lines.append(f"{x},{p:.12g}")
        lines.append(f"# E_J,{ring.flux_mean():.12g}")
        lines.append(f"# V_J,{ring.flux_variance():.12g}")
    elif args.what == "pair":
        snap = O.pair_distribution(args.i, args.j, args.t, which=args.which)
        lines.append("parity,mass")
        lines.append(f"0,{snap.parity_mass(0):.12g}")
        lines.append(f"1,{snap.parity_mass(1):.12g}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _add_audit(sub):
    p = sub.add_parser("audit-ising",
                       help="rate-equivalence audit of the Ising interface")
    p.add_argument("--mode", choices=("exhaustive", "simulate"),
                   default="exhaustive")
    p.add_argument("--max-height", type=int, default=4)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--t", type=float, default=4.0)
    p.add_argument("--W", type=int, default=12)
    p.add_argument("--seed", type=int, default=1)


def _cmd_audit(args) -> int:
    from .ising import (SpinWindow, evolve_ising, ising_vs_wall_rate_audit,
                        window_from_pattern)
    from .kernels import derive_seed

    mismatches = []
    checked = 0
    if args.mode == "exhaustive":
        hmax = args.max_height
        for b in range(0, hmax + 1):
            for a in (b - 1, b + 1):
                for c in (b - 1, b + 1):
                    if min(a, c) < 0 or max(a, b, c) > hmax:
                        continue
                    center = 0 if b % 2 == 0 else 1
                    sw = window_from_pattern([a, b, c], center, 8)
                    rep = ising_vs_wall_rate_audit(sw, [center])
                    checked += 1
                    mismatches += rep.mismatches
    else:
        for s in range(args.samples):
            sw = SpinWindow(args.W)
            evolve_ising(sw, args.t, derive_seed(args.seed, s))
            safe = max(2, args.W - int(np.ceil(args.t)) - 2)
            rep = ising_vs_wall_rate_audit(sw, list(range(-safe, safe + 1)))
            checked += 1
            mismatches += rep.mismatches
    print(f"audited {checked} states: {len(mismatches)} mismatches")
    for m in mismatches[:20]:
        print(" ", m)
    return 1 if mismatches else 0


def _cmd_selftest(_args) -> int:
    from . import exclusion as X
    from . import kernels as K
    from . import oracle as O

    ok = True

    def check(name: str, cond: bool) -> None:
        nonlocal ok
        print(f"{'PASS' if cond else 'FAIL'}  {name}")
        ok = ok and cond

    viol, guard, _ = K.sep_identity_ensemble(64, 8.0, 200, 20240501)
    check("exact identities (duality, J=H-I, |H'-I|<=1, height=2J, "
          "invariants) on 200 seeds", int(viol.sum()) == 0 and int(guard.sum()) == 0)
    v = K.monotone_pair_ensemble(64, 0, False, 0, True, 1, 8.0, 200, 7)
    check("monotone coupling domination and wall positivity on 200 seeds",
          int(v.sum()) == 0)
    a, b = O.v_term_two_ways(25.0)
    check("single-walk variance term, two routes agree", abs(a - b) < 1e-10)
    ring = O.exact_ring_transient(6, 1.0)
    bits, J = K.sep_smallring_ensemble(6, 1.0, 20000, 99)
    check("small-ring Monte Carlo within 3 sigma of the exact ring law",
          abs(float(J.mean()) - ring.flux_mean())
          < 3 * float(J.std()) / np.sqrt(len(J)) + 1e-9)
    dz, twoj = X.height_flux_identity_run(128, 16.0, 4242)
    check("height change at origin equals twice the flux", dz == twoj)
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="wallsep",
        description="interface-with-wall / exclusion-process simulator "
                    "and exact oracle toolkit")
    sub = parser.add_subparsers(dest="cmd", required=True)
    _add_run(sub)
    _add_oracle(sub)
    _add_audit(sub)
    sub.add_parser("selftest", help="quick invariant suite")
    args = parser.parse_args(argv)
    if args.cmd == "run":
        return _cmd_run(args)
    if args.cmd == "oracle":
        return _cmd_oracle(args)
    if args.cmd == "audit-ising":
        return _cmd_audit(args)
    return _cmd_selftest(args)


if __name__ == "__main__":
    sys.exit(main())
