"""Experiment orchestration: config parsing, reproducible replica streams,
replica-parallel execution, and CSV/manifest emission.

Numbers in CSV files are rendered with ``%.12g`` so reruns of the same
(config, seed, code version) are byte-identical.  The worker count only
affects scheduling inside kernels, never results; it is taken from the
WALLSEP_WORKERS environment variable when set.
"""

from __future__ import annotations

import dataclasses
import json
import os
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import kernels as K
from . import exclusion as X
from .kernels import derive_seed
from .lattice import new_flat
from .observables import accumulate

PROCESSES = ("wall", "free", "exclusion", "coupled-monotone", "coupled-shared",
             "ising")
SCHEDULES = ("discrete", "continuous")


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


@dataclass
class ExperimentConfig:
    process: str = "free"
    L: int = 1024
    times: tuple[float, ...] = (16.0,)
    replicas: int = 8
    seed: int = 1
    schedule: str = "discrete"
    init: str = "flat:0"
    observables: tuple[str, ...] = ("mean_height", "mean_square", "frac_zero")
    out: str | None = None

    def init_kind(self) -> tuple[str, float]:
        kind, _, arg = self.init.partition(":")
        if kind == "flat":
            r = int(arg or 0)
            if r < 0 or r % 2:
                raise ValueError("flat offset must be even and non-negative")
            return "flat", float(r)
        if kind == "product":
            rho = float(arg or 0.5)
            if not 0.0 < rho < 1.0:
                raise ValueError("product density must lie in (0, 1)")
            return "product", rho
        raise ValueError(f"unknown initial condition {self.init!r}")

    def validate(self) -> None:
        if self.process not in PROCESSES:
            raise ValueError(f"unknown process {self.process!r}")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"unknown schedule {self.schedule!r}")
        if self.replicas < 1:
            raise ValueError("need at least one replica")
        if self.L < 4 or self.L % 2:
            raise ValueError("L must be even and >= 4")
        if not self.times or any(t < 0 for t in self.times):
            raise ValueError("checkpoint times must be non-negative")
        if list(self.times) != sorted(self.times):
            raise ValueError("checkpoint times must be increasing")
        self.init_kind()
        if max(self.times) > self.L ** 2 / 100:
            warnings.warn(
                f"t_max={max(self.times)} exceeds L^2/100={self.L ** 2 / 100}: "
                "periodic-ring artifacts may be visible", stacklevel=2)


def parse_config_file(path: str | Path) -> ExperimentConfig:
    """Flat key=value text format; '#' starts a comment."""
    fields = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, val = line.partition("=")
        fields[key.strip()] = val.strip()
    return config_from_strings(fields)


def config_from_strings(fields: dict[str, str],
                        base: ExperimentConfig | None = None) -> ExperimentConfig:
    cfg = dataclasses.replace(base) if base else ExperimentConfig()
    for key, val in fields.items():
        if key in ("L", "replicas", "seed"):
            setattr(cfg, key, int(val))
        elif key in ("t", "times"):
            cfg.times = tuple(float(v) for v in val.split(","))
        elif key == "observables":
            cfg.observables = tuple(v.strip() for v in val.split(","))
        elif key in ("process", "schedule", "init", "out"):
            setattr(cfg, key, val)
        else:
            raise ValueError(f"unknown config key {key!r}")
    return cfg


@dataclass
class RunManifest:
    config: dict
    version: str
    master_seed: int
    seed_derivation: str
    replica_seeds: list[int]
    wall_clock_s: float
    files: list[str]

    def write(self, path: Path) -> None:
        path.write_text(json.dumps(dataclasses.asdict(self), indent=1) + "\n")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")


def _summary_rows(times, per_rep):
    """per_rep[rep, k] -> (t, estimate, ci_low, ci_high, n_replicas) rows."""
    rows = []
    for k, t in enumerate(times):
        acc = accumulate(per_rep[:, k])
        lo, hi = acc.ci(0.95)
        rows.append((t, acc.mean, lo, hi, acc.n))
    return rows


def set_worker_count() -> int:
    import numba

    n = os.environ.get("WALLSEP_WORKERS")
    if n:
        numba.set_num_threads(max(1, int(n)))
    return numba.get_num_threads()


def _emit_single_trajectory(config, times, out_dir, files, emit) -> None:
    """Replica-0 trajectory dump (t,observable,value rows) and, when the
    'field' observable is requested, serialized height-field checkpoints."""
    from .dynamics import ScheduleKind, UpdateRule, evolve
    from .lattice import new_flat, serialize
    from .observables import site_mean_square

    _, r = config.init_kind()
    rule = UpdateRule.WALL if config.process == "wall" else UpdateRule.FREE
    sched = (ScheduleKind.DISCRETE if config.schedule == "discrete"
             else ScheduleKind.CONTINUOUS)
    f = new_flat(config.L, int(r), walled=config.process == "wall")
    seed = derive_seed(config.seed, 0)
    rows = []
    prev = 0.0
    for k, t in enumerate(times):
        f = evolve(f, t - prev, sched, rule, derive_seed(seed, k)).field
        prev = t
        rows.append((t, "mean_height",
                     float(f.heights[::2].mean())))
        rows.append((t, "mean_square", site_mean_square(f)))
        rows.append((t, "frac_zero", float((f.heights == 0).mean())))
        if "field" in config.observables:
            path = out_dir / f"field_rep0_t{format(t, 'g')}.txt"
            path.write_text(serialize(f))
            files.append(path.name)
    if "trajectory" in config.observables:
        emit("trajectory", ["t", "observable", "value"], rows)


def run(config: ExperimentConfig) -> RunManifest:
    """Execute the experiment and write one CSV per observable plus
    manifest.json; deterministic given (config, seed, version)."""
    config.validate()
    set_worker_count()
    t0 = time.time()
    out_dir = Path(config.out) if config.out else Path.cwd() / "wallsep_out"
    out_dir.mkdir(parents=True, exist_ok=True)
    files: list[str] = []
    times = np.array(config.times, dtype=np.float64)
    kind, arg = config.init_kind()

    def emit(name: str, header, rows) -> None:
        path = out_dir / f"{name}.csv"
        _write_csv(path, header, rows)
        files.append(path.name)

    if config.process in ("wall", "free"):
        if kind != "flat":
            raise ValueError("height processes start from flat(r)")
        obs, guard = K.height_obs_ensemble(
            config.L, config.process == "wall", int(arg),
            0 if config.schedule == "discrete" else 1,
            times, config.replicas, config.seed)
        if guard.any():
            bad = int(np.flatnonzero(guard)[0])
            raise RuntimeError(
                f"replica {bad}: max height exceeded L/4; enlarge L "
                "(ring-approximation guard)")
        names = {"mean_height": 0, "mean_square": 1, "frac_zero": 2}
        for name in config.observables:
            if name in ("trajectory", "field"):
                continue
            if name not in names:
                raise ValueError(f"unknown height observable {name!r}")
            emit(name, ["t", "estimate", "ci_low", "ci_high", "n_replicas"],
                 _summary_rows(times, obs[:, :, names[name]]))
        if "trajectory" in config.observables or "field" in config.observables:
            _emit_single_trajectory(config, times, out_dir, files, emit)

    elif config.process == "exclusion":
        if kind == "flat" and arg != 0:
            raise ValueError("the exclusion map uses the flat(0) start")
        series = []
        J = np.empty((config.replicas, len(times)))
        for rep in range(config.replicas):
            seed = derive_seed(config.seed, rep)
            eta0 = (X.flat_occupation(config.L) if kind == "flat"
                    else X.product_measure_init(config.L, arg, seed))
            st = X.initial_state(eta0, track_heights=(kind == "flat"))
            prev = 0.0
            for k, t in enumerate(times):
                X.evolve_exclusion(st, t - prev, derive_seed(seed, k))
                prev = t
                d = X.flux_decomposition(st.stirring, st.eta0)
                series.append((rep, t, st.flux.J, d.H, d.I))
                J[rep, k] = st.flux.J
            if st.max_disp > config.L // 4:
                raise RuntimeError(
                    f"replica {rep}: label displacement {st.max_disp} exceeded "
                    f"L/4={config.L // 4}; enlarge L (ring guard)")
        emit("flux", ["replica", "t", "J", "H", "I"], series)
        emit("flux_mean", ["t", "estimate", "ci_low", "ci_high", "n_replicas"],
             _summary_rows(times, J))
        var_rows = []
        for k, t in enumerate(times):
            acc = accumulate(J[:, k])
            v = acc.variance()
            se = v * np.sqrt(2.0 / max(acc.n - 1, 1))
            var_rows.append((t, v, v - 1.96 * se, v + 1.96 * se, acc.n))
        emit("flux_variance", ["t", "estimate", "ci_low", "ci_high",
                               "n_replicas"], var_rows)

    elif config.process in ("coupled-monotone", "coupled-shared"):
        if kind != "flat":
            raise ValueError("coupled processes start from flat(r)")
        r = int(arg)
        wall_obs = np.empty((config.replicas, len(times)))
        free_obs = np.empty((config.replicas, len(times)))
        for rep in range(config.replicas):
            seed = derive_seed(config.seed, rep)
            xi = new_flat(config.L, r, walled=True).heights
            zeta = new_flat(config.L, r).heights
            prev = 0.0
            for k, t in enumerate(times):
                step_seed = derive_seed(seed, k)
                if config.process == "coupled-monotone":
                    bad, _, _ = K.monotone_pair_evolve(
                        zeta, xi, False, True,
                        0 if config.schedule == "discrete" else 1,
                        t - prev, K.useed(step_seed))
                    if bad:
                        raise RuntimeError(
                            f"replica {rep}: coupling invariant broken (mask {bad})")
                else:
                    K.shared_pair_evolve(xi, zeta, t - prev, K.useed(step_seed))
                prev = t
                wall_obs[rep, k] = (xi * xi).mean()
                free_obs[rep, k] = (zeta * zeta).mean()
        emit("wall_mean_square", ["t", "estimate", "ci_low", "ci_high",
                                  "n_replicas"], _summary_rows(times, wall_obs))
        emit("free_mean_square", ["t", "estimate", "ci_low", "ci_high",
                                  "n_replicas"], _summary_rows(times, free_obs))

    elif config.process == "ising":
        from .ising import SpinWindow, evolve_ising, ising_vs_wall_rate_audit, \
            spin_to_interface

        W = config.L // 2  # window half-width from the configured extent
        mean_sq = np.empty((config.replicas, len(times)))
        mismatches = 0
        for rep in range(config.replicas):
            sw = SpinWindow(W)
            prev = 0.0
            seed = derive_seed(config.seed, rep)
            for k, t in enumerate(times):
                evolve_ising(sw, t - prev, derive_seed(seed, k))
                prev = t
                safe = max(2, W - int(np.ceil(t)) - 2)
                cols = list(range(-safe, safe + 1))
                mismatches += len(ising_vs_wall_rate_audit(sw, cols).mismatches)
                h = spin_to_interface(sw).heights
                ctr = h[W - safe: W + safe + 1]
                mean_sq[rep, k] = float((ctr * ctr).mean())
        emit("interface_mean_square", ["t", "estimate", "ci_low", "ci_high",
                                       "n_replicas"], _summary_rows(times, mean_sq))
        emit("audit", ["mismatches"], [(mismatches,)])

    manifest = RunManifest(
        config={f.name: getattr(config, f.name)
                for f in dataclasses.fields(config)},
        version=__version__,
        master_seed=config.seed,
        seed_derivation="splitmix64(master + (replica_index+1)*0x9E3779B97F4A7C15)",
        replica_seeds=[derive_seed(config.seed, i)
                       for i in range(min(config.replicas, 1024))],
        wall_clock_s=time.time() - t0,
        files=files,
    )
    manifest.write(out_dir / "manifest.json")
    return manifest
