"""Statistics pipeline: mergeable moment accumulators, scaled empirical
distributions, and the log/power-law fits used on the interface data.

Confidence intervals always come from replica-level variance: sites of one
ring are dependent (of order L / sqrt(t) weakly dependent segments), so
independent seeds are the only honest batching unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import HeightField


@dataclass
class EnsembleAccumulator:
    """Single-pass mean / second-moment accumulator (Welford form);
    merging is exact up to float round-off and order-insensitive."""

    n: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def add(self, x: float) -> None:
        self.n += 1
        d = x - self.mean
        self.mean += d / self.n
        self.m2 += d * (x - self.mean)

    def add_many(self, xs) -> None:
        for x in xs:
            self.add(float(x))

    def merge(self, other: "EnsembleAccumulator") -> "EnsembleAccumulator":
        if other.n == 0:
            return self
        if self.n == 0:
            self.n, self.mean, self.m2 = other.n, other.mean, other.m2
            return self
        n = self.n + other.n
        d = other.mean - self.mean
        self.mean += d * other.n / n
        self.m2 += other.m2 + d * d * self.n * other.n / n
        self.n = n
        return self

    def variance(self, ddof: int = 1) -> float:
        if self.n <= ddof:
            return float("nan")
        return self.m2 / (self.n - ddof)

    def sem(self) -> float:
        return math.sqrt(self.variance() / self.n)

    def ci(self, level: float = 0.95) -> tuple[float, float]:
        """Student-t interval over the accumulated (replica-level) values."""
        from scipy import stats

        if self.n < 2:
            return float("nan"), float("nan")
        q = float(stats.t.ppf(0.5 + level / 2.0, self.n - 1))
        half = q * self.sem()
        return self.mean - half, self.mean + half


def accumulate(values) -> EnsembleAccumulator:
    acc = EnsembleAccumulator()
    acc.add_many(values)
    return acc


def site_mean_square(h: HeightField) -> float:
    """L^{-1} sum_x h(x)^2, evaluated in exact integer arithmetic."""
    s = int(np.sum(h.heights.astype(object) ** 2))
    return s / h.L


@dataclass
class ScaledHistogram:
    """Empirical height distribution in s = value / t^{1/4} units, one bin
    per attainable integer height (bin width t^{-1/4})."""

    t: float
    values: np.ndarray   # attainable integer heights present in the field
    masses: np.ndarray   # site fractions, summing to 1

    @property
    def s(self) -> np.ndarray:
        return self.values / self.t ** 0.25

    @property
    def density(self) -> np.ndarray:
        """phi(s) = t^{1/4} * mass, the lattice density in s units."""
        return self.masses * self.t ** 0.25

    def mass_at(self, value: int) -> float:
        idx = np.searchsorted(self.values, value)
        if idx < len(self.values) and self.values[idx] == value:
            return float(self.masses[idx])
        return 0.0

    def moment(self, k: int) -> float:
        return float(np.sum(self.s ** k * self.masses))


def scaled_distribution(h: HeightField, t: float) -> ScaledHistogram:
    if t <= 0:
        raise ValueError("t must be positive")
    values, counts = np.unique(h.heights, return_counts=True)
    return ScaledHistogram(t, values.astype(np.int64), counts / h.L)


@dataclass
class FitResult:
    a: float
    b: float
    rss: float
    model: str


def _least_squares(x: np.ndarray, y: np.ndarray, model: str) -> FitResult:
    if len(x) < 3 or len(np.unique(x)) < 2:
        raise ValueError("need at least 3 samples with distinct abscissae")
    A = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    r = y - A @ coef
    return FitResult(float(coef[0]), float(coef[1]), float(r @ r), model)


def log_fit(samples) -> FitResult:
    """Least squares for y = a + b log t over (t, y) samples."""
    t, y = (np.asarray(v, dtype=float) for v in zip(*samples))
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    return _least_squares(np.log(t), y, "a+b*log(t)")


def exponent_fit(samples) -> FitResult:
    """Least squares slope of log y against log t (power-law exponent b)."""
    t, y = (np.asarray(v, dtype=float) for v in zip(*samples))
    if np.any(t <= 0) or np.any(y <= 0):
        raise ValueError("t and y must be positive for a log-log fit")
    return _least_squares(np.log(t), np.log(y), "power-law")


@dataclass
class MomentNormality:
    """Moment-based normality report: skewness and excess kurtosis with
    plain large-sample standard errors."""

    skew: float
    skew_se: float
    excess_kurtosis: float
    kurt_se: float

    def compatible(self, z: float = 4.0) -> bool:
        return (abs(self.skew) <= z * self.skew_se
                and abs(self.excess_kurtosis) <= z * self.kurt_se)


def moment_normality(values: np.ndarray, n_eff: int | None = None) -> MomentNormality:
    v = np.asarray(values, dtype=float)
    n = len(v) if n_eff is None else n_eff
    m = v.mean()
    c = v - m
    s2 = float(np.mean(c * c))
    skew = float(np.mean(c ** 3) / s2 ** 1.5)
    kurt = float(np.mean(c ** 4) / s2 ** 2 - 3.0)
    return MomentNormality(skew, math.sqrt(6.0 / n), kurt, math.sqrt(24.0 / n))


def replica_slope_ci(per_replica_samples, fit, level: float = 0.95
                     ) -> tuple[float, float, float]:
    """Fit each replica's (t, y) curve separately and return the mean slope
    with its replica-batched Student-t confidence interval."""
    slopes = [fit(s).b for s in per_replica_samples]
    acc = accumulate(slopes)
    lo, hi = acc.ci(level)
    return acc.mean, lo, hi
