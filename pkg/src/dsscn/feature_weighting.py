"""Online feature redundancy scoring and per-feature weight assignment.

Pairwise linear dependence is measured with the maximal information
compression index (MICI): gamma = 0 means the two series are perfectly
correlated, so features with low average gamma are redundant and receive
low weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ConstantFeatureError(ValueError):
    """Raised when a correlation is requested against a zero-variance series."""


@dataclass
class PairStats:
    """Streaming accumulators for one pair of series.

    Mergeable: combining two PairStats equals the stats of the concatenated
    data.  Variances are population variances (divide by count).
    """

    count: int = 0
    sum1: float = 0.0
    sum2: float = 0.0
    sumsq1: float = 0.0
    sumsq2: float = 0.0
    sumprod: float = 0.0

    def update(self, x1, x2) -> "PairStats":
        x1 = np.asarray(x1, dtype=float).ravel()
        x2 = np.asarray(x2, dtype=float).ravel()
        if x1.size != x2.size:
            raise ValueError("series lengths differ")
        self.count += x1.size
        self.sum1 += x1.sum()
        self.sum2 += x2.sum()
        self.sumsq1 += (x1 ** 2).sum()
        self.sumsq2 += (x2 ** 2).sum()
        self.sumprod += (x1 * x2).sum()
        return self

    def merge(self, other: "PairStats") -> "PairStats":
        return PairStats(self.count + other.count,
                         self.sum1 + other.sum1,
                         self.sum2 + other.sum2,
                         self.sumsq1 + other.sumsq1,
                         self.sumsq2 + other.sumsq2,
                         self.sumprod + other.sumprod)

    @property
    def var1(self) -> float:
        m = self.sum1 / self.count
        return max(self.sumsq1 / self.count - m * m, 0.0)

    @property
    def var2(self) -> float:
        m = self.sum2 / self.count
        return max(self.sumsq2 / self.count - m * m, 0.0)

    @property
    def cov(self) -> float:
        return self.sumprod / self.count - (self.sum1 / self.count) * (self.sum2 / self.count)


def pearson(stats: PairStats) -> float:
    """Pearson correlation from streaming accumulators, clamped to [-1, 1]."""
    if stats.count < 2:
        raise ValueError("need at least 2 samples")
    v1, v2 = stats.var1, stats.var2
    if v1 <= 0.0 or v2 <= 0.0:
        raise ConstantFeatureError("zero-variance series")
    rho = stats.cov / np.sqrt(v1 * v2)
    return float(np.clip(rho, -1.0, 1.0))


def mici(stats: PairStats) -> float:
    """Maximal information compression index of the pair.

    gamma = (v1 + v2 - sqrt((v1 + v2)^2 - 4 v1 v2 (1 - rho^2))) / 2, the
    smaller eigenvalue of the pair's covariance matrix.  gamma = 0 iff the
    series are perfectly linearly dependent; a zero-variance series is treated
    as maximally redundant (gamma = 0).
    """
    if stats.count < 2:
        raise ValueError("need at least 2 samples")
    v1, v2 = stats.var1, stats.var2
    if v1 <= 0.0 or v2 <= 0.0:
        return 0.0
    rho = pearson(stats)
    s = v1 + v2
    radicand = max(s * s - 4.0 * v1 * v2 * (1.0 - rho * rho), 0.0)
    return 0.5 * (s - np.sqrt(radicand))


def mici_series(x1, x2) -> float:
    """MICI of two fully observed series (one-shot convenience wrapper)."""
    return mici(PairStats().update(x1, x2))


def feature_scores(gamma: np.ndarray) -> np.ndarray:
    """Per-feature similarity score: row means of the pairwise gamma matrix.

    ``gamma`` is (n, n); the diagonal is ignored.  A single feature scores 1
    by convention.
    """
    gamma = np.asarray(gamma, dtype=float)
    n = gamma.shape[0]
    if n == 1:
        return np.ones(1)
    mask = ~np.eye(n, dtype=bool)
    return np.array([gamma[j, mask[j]].mean() for j in range(n)])


def input_weights(scores: np.ndarray) -> np.ndarray:
    """Normalize scores to weights in [0, 1] against the maximum score."""
    scores = np.asarray(scores, dtype=float)
    if np.any(scores < 0):
        raise ValueError("scores must be nonnegative")
    mx = scores.max()
    if mx == 0.0:
        return np.ones_like(scores)
    return scores / mx


@dataclass
class FeatureWeighter:
    """Whole-stream accumulator producing the shared input weight vector.

    Keeps count, per-feature sums and the full cross-product matrix so all
    pairwise MICI values come out of one vectorized pass.  Updated chunk by
    chunk before weights are recomputed; the weights then apply to the
    current chunk and are shared by every layer.
    """

    n: int
    count: int = 0
    sums: np.ndarray = field(default=None)
    cross: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.sums is None:
            self.sums = np.zeros(self.n)
        if self.cross is None:
            self.cross = np.zeros((self.n, self.n))

    def update(self, X: np.ndarray) -> None:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        self.count += X.shape[0]
        self.sums += X.sum(axis=0)
        self.cross += X.T @ X

    def gamma_matrix(self) -> np.ndarray:
        mean = self.sums / self.count
        cov = self.cross / self.count - np.outer(mean, mean)
        var = np.clip(np.diag(cov), 0.0, None)
        vv = np.outer(var, var)
        with np.errstate(invalid="ignore", divide="ignore"):
            rho = np.where(vv > 0.0, cov / np.sqrt(np.where(vv > 0, vv, 1.0)), 0.0)
        rho = np.clip(rho, -1.0, 1.0)
        s = var[:, None] + var[None, :]
        radicand = np.clip(s * s - 4.0 * vv * (1.0 - rho ** 2), 0.0, None)
        gamma = 0.5 * (s - np.sqrt(radicand))
        # a zero-variance feature carries no information: gamma pinned to 0
        dead = var <= 0.0
        gamma[dead, :] = 0.0
        gamma[:, dead] = 0.0
        return gamma

    def weights(self) -> np.ndarray:
        if self.n == 1 or self.count < 2:
            return np.ones(self.n)
        return input_weights(feature_scores(self.gamma_matrix()))
