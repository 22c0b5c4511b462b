"""Hoeffding-bound three-state drift detector with cut-point search.

The detector watches a per-sample statistic (0/1 prediction error in the
stacked classifier), accumulates it across chunks, locates the most likely
switching point of the population mean, and classifies each chunk as DRIFT,
WARNING or STABLE with significance levels that tighten as more data arrive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

DRIFT = "DRIFT"
WARNING = "WARNING"
STABLE = "STABLE"


class UndefinedBoundError(ValueError):
    """Significance level outside (0, 1): the bound is undefined (infinite)."""


@dataclass
class DriftConfig:
    tau: float = 50_000.0     # significance time-constant, in samples
    alpha_min_drift: float = 0.09
    alpha_min_warning: float = 0.1

    def __post_init__(self):
        if not (0.0 < self.alpha_min_drift < self.alpha_min_warning < 1.0):
            raise ValueError("need 0 < alpha_min_drift < alpha_min_warning < 1")


@dataclass
class DriftVerdict:
    status: str
    cut: Optional[int] = None
    dist: float = 0.0
    eps_drift: float = math.inf
    eps_warning: float = math.inf
    alpha_drift: float = 0.0
    alpha_warning: float = 0.0


def hoeffding_bound(a: float, b: float, N: int, cut: int, alpha: float) -> float:
    """One-sided Hoeffding deviation bound for a prefix of ``cut`` samples.

    eps = (b - a) * sqrt((N - cut) / (2 * cut * (N - cut)) * ln(1 / alpha)),
    which simplifies to (b - a) * sqrt(ln(1/alpha) / (2 * cut)).
    """
    if b < a:
        raise ValueError("b < a")
    if not (1 <= cut < N):
        raise ValueError("cut outside [1, N)")
    if alpha <= 0.0 or alpha >= 1.0:
        raise UndefinedBoundError(f"alpha={alpha} outside (0, 1)")
    return (b - a) * math.sqrt(
        (N - cut) / (2.0 * cut * (N - cut)) * math.log(1.0 / alpha))


def two_sample_bound(a: float, b: float, n1: int, n2: int, alpha: float) -> float:
    """Hoeffding bound on the difference of two partition means."""
    if alpha <= 0.0 or alpha >= 1.0:
        raise UndefinedBoundError(f"alpha={alpha} outside (0, 1)")
    return (b - a) * math.sqrt(
        (n1 + n2) / (2.0 * n1 * n2) * math.log(1.0 / alpha))


def significance_schedule(t: float, cfg: DriftConfig) -> tuple:
    """Time-varying significance pair (alpha_drift, alpha_warning).

    Both rise as 1 - exp(-t / tau) and are capped at their configured minima
    so the confidence level stays above 90%.  At t = 0 both are 0, which
    makes every bound infinite and forces a STABLE verdict.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    base = 1.0 - math.exp(-t / cfg.tau)
    return (min(base, cfg.alpha_min_drift), min(base, cfg.alpha_min_warning))


def find_cut(series: np.ndarray, alpha_drift: float) -> Optional[int]:
    """Locate the switching point of the monitored series.

    Returns the index c in [1, N-1] minimizing mean(series[:c]) + eps(c),
    the prefix whose upper-confidence mean is lowest.  A mean increase after
    c makes the objective turn upward exactly at the switch, so the argmin
    tracks the change point; on a non-increasing series it sits at N-1 where
    the bound is widest and the verdict stays STABLE.  Returns None when the
    series has zero range or alpha makes the bound undefined.
    """
    series = np.asarray(series, dtype=float)
    N = series.size
    if N < 2:
        raise ValueError("series length must be >= 2")
    if np.any(np.isnan(series)):
        raise ValueError("NaN in monitored series")
    a, b = series.min(), series.max()
    if b == a or alpha_drift <= 0.0:
        return None
    counts = np.arange(1, N, dtype=float)
    prefix_means = np.cumsum(series)[:-1] / counts
    eps = (b - a) * np.sqrt(math.log(1.0 / alpha_drift) / (2.0 * counts))
    return int(np.argmin(prefix_means + eps)) + 1


def detect(series: np.ndarray, t: float, cfg: DriftConfig) -> DriftVerdict:
    """Classify the monitored series as DRIFT / WARNING / STABLE.

    The series is split at the cut into Z1 (before) and Z2 (after) and
    dist = |mean(Z1) - mean(Z2)| is tested against the Hoeffding bounds at
    the drift and warning significance levels.  Pure in (series, t, cfg).
    """
    series = np.asarray(series, dtype=float)
    if np.any(np.isnan(series)):
        raise ValueError("NaN in monitored series")
    alpha_d, alpha_w = significance_schedule(t, cfg)
    if alpha_d <= 0.0 or series.size < 2:
        return DriftVerdict(STABLE, alpha_drift=alpha_d, alpha_warning=alpha_w)
    cut = find_cut(series, alpha_d)
    if cut is None:
        return DriftVerdict(STABLE, alpha_drift=alpha_d, alpha_warning=alpha_w)
    a, b = series.min(), series.max()
    n1, n2 = cut, series.size - cut
    dist = abs(series[:cut].mean() - series[cut:].mean())
    eps_d = two_sample_bound(a, b, n1, n2, alpha_d)
    eps_w = two_sample_bound(a, b, n1, n2, alpha_w)
    if dist >= eps_d:
        status = DRIFT
    elif dist >= eps_w:
        status = WARNING
    else:
        status = STABLE
    return DriftVerdict(status, cut=cut, dist=float(dist),
                        eps_drift=eps_d, eps_warning=eps_w,
                        alpha_drift=alpha_d, alpha_warning=alpha_w)


@dataclass
class DriftDetector:
    """Stateful wrapper: accumulates the monitored series across chunks.

    One detector per stacked network.  The window resets whenever a drift is
    confirmed so each window covers a single concept.
    """

    cfg: DriftConfig = field(default_factory=DriftConfig)
    samples_seen: int = 0
    window: list = field(default_factory=list)

    def step(self, chunk_series: np.ndarray) -> DriftVerdict:
        chunk_series = np.asarray(chunk_series, dtype=float)
        self.samples_seen += chunk_series.size
        self.window.append(chunk_series)
        series = np.concatenate(self.window)
        verdict = detect(series, self.samples_seen, self.cfg)
        if verdict.status == DRIFT:
            self.window = []
        return verdict

    def reset_window(self) -> None:
        self.window = []
