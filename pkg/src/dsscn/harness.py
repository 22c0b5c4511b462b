"""Periodic hold-out and prequential test-then-train protocol runners."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from typing import Iterable, List, Optional

import numpy as np

from .stack import StackConfig, StackedNetwork
from .streams import DataChunk

HOLDOUT = "HOLDOUT"
PREQUENTIAL = "PREQUENTIAL"


@dataclass
class RunConfig:
    protocol: str = PREQUENTIAL
    chunk_size: int = 500
    holdout_train_fraction: float = 0.8
    seed: int = 0
    stack: StackConfig = field(default_factory=StackConfig)

    def __post_init__(self):
        if self.chunk_size < 2:
            raise ValueError("chunk_size must be >= 2")
        if self.protocol == HOLDOUT and not (0.0 < self.holdout_train_fraction < 1.0):
            raise ValueError("holdout train fraction must be in (0, 1)")
        if self.protocol not in (HOLDOUT, PREQUENTIAL):
            raise ValueError(f"unknown protocol {self.protocol}")


@dataclass
class TraceRow:
    stamp: int
    accuracy: Optional[float]
    depth: int
    nodes: int
    status: str
    cut: Optional[int]
    dist: float
    eps_drift: float
    eps_warning: float
    alpha_drift: float
    alpha_warning: float
    lam: np.ndarray
    runtime: float = 0.0   # wall seconds; kept out of the trace CSV


@dataclass
class RunReport:
    rows: List[TraceRow] = field(default_factory=list)
    scope_events: list = field(default_factory=list)  # (stamp, layer, ScnOutcome)
    config_header: dict = field(default_factory=dict)

    @property
    def accuracies(self) -> np.ndarray:
        return np.array([r.accuracy for r in self.rows if r.accuracy is not None])

    @property
    def drift_stamps(self) -> List[int]:
        return [r.stamp for r in self.rows if r.status == "DRIFT"]

    @property
    def warning_stamps(self) -> List[int]:
        return [r.stamp for r in self.rows if r.status == "WARNING"]

    def trace_csv(self) -> str:
        """Deterministic trace: one row per stamp, no wall-clock columns."""
        if not self.rows:
            return ""
        n = self.rows[0].lam.size
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["stamp", "accuracy", "depth", "nodes", "status", "cut",
                         "dist", "eps_drift", "eps_warning",
                         "alpha_drift", "alpha_warning"]
                        + [f"lambda_{j + 1}" for j in range(n)])
        for r in self.rows:
            writer.writerow([r.stamp,
                             "" if r.accuracy is None else repr(r.accuracy),
                             r.depth, r.nodes, r.status,
                             "" if r.cut is None else r.cut,
                             repr(r.dist), repr(r.eps_drift), repr(r.eps_warning),
                             repr(r.alpha_drift), repr(r.alpha_warning)]
                            + [repr(float(v)) for v in r.lam])
        return buf.getvalue()

    def write_trace(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(self.trace_csv())


def summarize(report: RunReport) -> dict:
    """Mean and population std per metric, plus the drift-event list."""
    if not report.rows:
        raise ValueError("empty trace")
    acc = report.accuracies
    depths = np.array([r.depth for r in report.rows], dtype=float)
    nodes = np.array([r.nodes for r in report.rows], dtype=float)
    runtimes = np.array([r.runtime for r in report.rows], dtype=float)

    def ms(v):
        return (float(v.mean()), float(v.std())) if v.size else (float("nan"), 0.0)

    summary = {
        "classification_rate": ms(acc),
        "node": ms(nodes),
        "layer": ms(depths),
        "runtime": ms(runtimes),
        "stamps": len(report.rows),
        "drift_stamps": report.drift_stamps,
        "warning_stamps": report.warning_stamps,
        "scopes_used": sorted({ev.scope_used for _, _, ev in report.scope_events}),
    }
    return summary


def write_summary(path: str, summary: dict, header: dict) -> None:
    """Key-value summary with the fully resolved run config echoed on top."""
    with open(path, "w") as fh:
        for k in sorted(header):
            fh.write(f"config.{k} = {header[k]}\n")
        for key in ("classification_rate", "node", "layer", "runtime"):
            mean, std = summary[key]
            fh.write(f"{key} = {mean:.6f} +/- {std:.6f}\n")
        fh.write(f"stamps = {summary['stamps']}\n")
        fh.write(f"drift_stamps = {summary['drift_stamps']}\n")
        fh.write(f"warning_stamps = {summary['warning_stamps']}\n")
        fh.write(f"scopes_used = {summary['scopes_used']}\n")


def _run(chunks: Iterable[DataChunk], n: int, m: int, cfg: RunConfig,
         test_then_train: bool) -> RunReport:
    net = StackedNetwork(n, m, config=cfg.stack, seed=cfg.seed)
    report = RunReport()
    for chunk in chunks:
        t0 = time.perf_counter()
        accuracy = None
        if test_then_train:
            if net.depth >= 1:
                pred = net.predict(chunk.X)
                accuracy = float(np.mean(pred == chunk.labels))
            chunk_report = net.process_chunk(chunk)
        else:
            n_train = int(round(cfg.holdout_train_fraction * chunk.n_samples))
            if n_train < 1 or n_train >= chunk.n_samples:
                raise ValueError(
                    f"chunk of {chunk.n_samples} too small to split at "
                    f"fraction {cfg.holdout_train_fraction}")
            train = DataChunk(chunk.X[:n_train], chunk.Y[:n_train], chunk.stamp)
            test = DataChunk(chunk.X[n_train:], chunk.Y[n_train:], chunk.stamp)
            chunk_report = net.process_chunk(train)
            pred = net.predict(test.X)
            accuracy = float(np.mean(pred == test.labels))
        elapsed = time.perf_counter() - t0
        v = chunk_report.verdict
        report.rows.append(TraceRow(
            stamp=chunk.stamp, accuracy=accuracy,
            depth=chunk_report.depth, nodes=chunk_report.total_nodes,
            status=v.status, cut=v.cut, dist=v.dist,
            eps_drift=v.eps_drift, eps_warning=v.eps_warning,
            alpha_drift=v.alpha_drift, alpha_warning=v.alpha_warning,
            lam=chunk_report.lam, runtime=elapsed))
        for stamp, layer_idx, ev in chunk_report.scn_events:
            report.scope_events.append((stamp, layer_idx, ev))
    report.config_header = dict(cfg.stack.resolved())
    report.config_header.update({
        "run.protocol": cfg.protocol, "run.chunk_size": cfg.chunk_size,
        "run.holdout_train_fraction": cfg.holdout_train_fraction,
        "run.seed": cfg.seed})
    return report, net


def run_holdout(chunks: Iterable[DataChunk], n: int, m: int,
                cfg: RunConfig) -> RunReport:
    """Train-then-test: the leading split of each chunk trains, the trailing
    split is scored with the post-update model."""
    report, _ = _run(chunks, n, m, cfg, test_then_train=False)
    return report


def run_prequential(chunks: Iterable[DataChunk], n: int, m: int,
                    cfg: RunConfig) -> RunReport:
    """Test-then-train: every chunk after the first is scored with the model
    trained through the previous chunk, then used for training."""
    report, _ = _run(chunks, n, m, cfg, test_then_train=True)
    return report


def run(chunks: Iterable[DataChunk], n: int, m: int, cfg: RunConfig):
    """Protocol dispatch returning (report, trained network)."""
    return _run(chunks, n, m, cfg, test_then_train=cfg.protocol == PREQUENTIAL)
