"""Streaming data model, synthetic drifting-stream generators and CSV ingestion."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np


@dataclass
class DataChunk:
    """A time-stamped batch of feature vectors with optional one-hot labels."""

    X: np.ndarray            # (N, n) real features
    Y: Optional[np.ndarray]  # (N, m) one-hot rows, or None for unlabeled data
    stamp: int = 0

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        if self.X.shape[0] < 1:
            raise ValueError("chunk must hold at least one sample")
        if not np.all(np.isfinite(self.X)):
            raise ValueError("chunk features must be finite")
        if self.Y is not None:
            self.Y = np.atleast_2d(np.asarray(self.Y, dtype=float))
            if self.Y.shape[0] != self.X.shape[0]:
                raise ValueError("X and Y row counts differ")
            if not np.allclose(self.Y.sum(axis=1), 1.0):
                raise ValueError("each label row must sum to 1")

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def labels(self) -> np.ndarray:
        """1-based integer class labels recovered from the one-hot matrix."""
        if self.Y is None:
            raise ValueError("chunk is unlabeled")
        return np.argmax(self.Y, axis=1) + 1


def one_hot_encode(labels: Sequence[int], m: int) -> np.ndarray:
    """Encode 1-based integer labels into an (N, m) 0/1 class matrix."""
    labels = np.asarray(labels, dtype=int)
    for idx, lab in enumerate(labels):
        if lab < 1 or lab > m:
            raise ValueError(f"label {lab} at index {idx} outside [1, {m}]")
    Y = np.zeros((labels.size, m))
    Y[np.arange(labels.size), labels - 1] = 1.0
    return Y


def generate_sea(samples: int,
                 theta_schedule: Sequence[tuple] = ((0, 4.0),),
                 minority_fraction: Optional[float] = None,
                 seed: int = 0) -> tuple:
    """SEA concepts stream: three uniform features on [0, 10], f3 pure noise.

    Class 1 iff f1 + f2 < theta under the theta active at the sample index.
    ``theta_schedule`` is a sequence of (start_index, theta) pairs with strictly
    increasing start indices.  When ``minority_fraction`` is given, class-1 rows
    are rejection-sampled down to that fraction of the output.

    Returns (X, labels) with 1-based labels.
    """
    starts = [int(s) for s, _ in theta_schedule]
    if starts != sorted(set(starts)):
        raise ValueError("theta_schedule start indices must be strictly increasing")
    rng = np.random.default_rng(seed)

    def theta_at(i):
        th = theta_schedule[0][1]
        for s, t in theta_schedule:
            if i >= s:
                th = t
        return th

    X = rng.uniform(0.0, 10.0, size=(samples, 3))
    thetas = np.array([theta_at(i) for i in range(samples)])
    labels = np.where(X[:, 0] + X[:, 1] < thetas, 1, 2)

    if minority_fraction is not None:
        keep = np.ones(samples, dtype=bool)
        ones = np.flatnonzero(labels == 1)
        # rejection-sample class 1 down to the target fraction of the output:
        # keep k of the ones so that k / (others + k) = minority_fraction
        others = samples - ones.size
        target = int(round(minority_fraction * others / (1.0 - minority_fraction)))
        if ones.size > target:
            drop = rng.choice(ones, size=ones.size - target, replace=False)
            keep[drop] = False
        X, labels = X[keep], labels[keep]
    return X, labels


def generate_hyperplane(samples: int,
                        dim: int,
                        w: Sequence[float],
                        w0: float,
                        drift_start: int,
                        drift_span: int,
                        w_after: Sequence[float],
                        seed: int = 0) -> tuple:
    """Rotating-hyperplane stream with a gradual concept transition.

    Class 1 iff sum_i x_i * w_i > w0 under the active concept.  During
    [drift_start, drift_start + drift_span) each sample is drawn from the
    second concept with probability rising linearly from 0 to 1; afterwards
    the second concept fully replaces the first.
    """
    w = np.asarray(w, dtype=float)
    w_after = np.asarray(w_after, dtype=float)
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if w.size != dim or w_after.size != dim:
        raise ValueError("weight vector length must equal dim")
    if not (0 <= drift_start <= samples):
        raise ValueError("drift_start outside [0, samples]")
    rng = np.random.default_rng(seed)
    X = rng.uniform(0.0, 1.0, size=(samples, dim))
    idx = np.arange(samples)
    if drift_span > 0:
        p2 = np.clip((idx - drift_start) / drift_span, 0.0, 1.0)
    else:
        p2 = (idx >= drift_start).astype(float)
    use_second = rng.uniform(size=samples) < p2
    score1 = X @ w
    score2 = X @ w_after
    score = np.where(use_second, score2, score1)
    labels = np.where(score > w0, 1, 2)
    return X, labels


def chunk_stream(X: np.ndarray, labels: np.ndarray, chunk_size: int,
                 m: Optional[int] = None) -> Iterator[DataChunk]:
    """Slice (X, labels) into DataChunks of chunk_size rows, preserving order."""
    if m is None:
        m = int(np.max(labels))
    for stamp, lo in enumerate(range(0, X.shape[0], chunk_size)):
        hi = min(lo + chunk_size, X.shape[0])
        yield DataChunk(X[lo:hi], one_hot_encode(labels[lo:hi], m), stamp=stamp)


def load_csv_stream(path: str, chunk_size: int,
                    label_column: int = -1) -> Iterator[DataChunk]:
    """Yield DataChunks from a CSV file, one numeric sample per row.

    The label column holds 1-based integer classes; a non-numeric first row is
    treated as a header and skipped.  The file is scanned once up front for the
    maximum label so the one-hot width is consistent across chunks.
    """
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for r, row in enumerate(reader):
            if not row:
                continue
            try:
                vals = [float(v) for v in row]
            except ValueError as exc:
                if r == 0:
                    continue  # header row
                bad = next(i for i, v in enumerate(row)
                           if not _is_float(v))
                raise ValueError(f"non-numeric cell at row {r}, column {bad}") from exc
            rows.append(vals)
    if not rows:
        raise ValueError(f"empty stream file: {path}")
    data = np.asarray(rows, dtype=float)
    labels = data[:, label_column].astype(int)
    X = np.delete(data, label_column % data.shape[1], axis=1)
    m = int(labels.max())
    yield from chunk_stream(X, labels, chunk_size, m=m)


def _is_float(v: str) -> bool:
    try:
        float(v)
        return True
    except ValueError:
        return False


def write_csv_stream(path: str, X: np.ndarray, labels: np.ndarray) -> int:
    """Write a labeled stream as CSV (features..., label). Returns row count."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for x, lab in zip(X, labels):
            writer.writerow([repr(float(v)) for v in x] + [int(lab)])
    return X.shape[0]
