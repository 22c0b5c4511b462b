"""Deep stacked orchestrator: random-shift layer chaining, drift-driven layer
growth, warning buffering, similarity-driven layer merging, and last-layer-only
updates.
"""

from __future__ import annotations

import pickle
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import drift as drift_mod
from .drift import DriftConfig, DriftDetector, DriftVerdict
from .escn import EscnConfig, EscnLayer, predict_class
from .feature_weighting import FeatureWeighter, mici_series
from .scn_init import ScnConfigurer, ScnParams
from .streams import DataChunk


@dataclass
class StackConfig:
    alpha: float = 0.5          # random-shift constant
    delta_merge: float = 1e-5   # layer-merge threshold on output MICI
    tau_chunks: float = 100.0   # drift significance time-constant, in chunks
    escn: EscnConfig = field(default_factory=EscnConfig)
    scn: ScnParams = field(default_factory=ScnParams)
    drift: DriftConfig = None   # resolved from tau_chunks at the first chunk

    def resolved(self) -> dict:
        """Flat dotted-key view of every materialized setting."""
        out = {"stack.alpha": self.alpha,
               "stack.delta_merge": self.delta_merge,
               "stack.tau_chunks": self.tau_chunks,
               "escn.q": self.escn.q, "escn.omega": self.escn.omega,
               "escn.rho_decay": self.escn.rho_decay,
               "escn.delta_c_factor": self.escn.delta_c_factor,
               "escn.p_replace": self.escn.p_replace,
               "escn.theta_prune": self.escn.theta_prune,
               "scn.t_max": self.scn.t_max,
               "scn.scopes": list(self.scn.scopes),
               "scn.r": self.scn.r}
        if self.drift is not None:
            out.update({"drift.tau": self.drift.tau,
                        "drift.alpha_min_drift": self.drift.alpha_min_drift,
                        "drift.alpha_min_warning": self.drift.alpha_min_warning})
        return out


@dataclass(eq=False)
class LayerLink:
    """One stacked unit: a base learner plus its frozen projection matrix.

    ``P`` projects the preceding layer's output into the feature space to
    produce this layer's random shift; it is unused on the bottom layer.
    """

    layer: EscnLayer
    P: np.ndarray         # (m, n), entries in [0, 1], immutable after creation
    birth_stamp: int = 0


@dataclass
class ChunkReport:
    stamp: int
    verdict: Optional[DriftVerdict]
    depth: int
    total_nodes: int
    lam: np.ndarray
    accuracy_before_update: Optional[float] = None
    layer_stats: Optional[dict] = None
    merged: int = 0
    scn_events: list = field(default_factory=list)
    no_coverage: int = 0


def layer_input(X: np.ndarray, lam: np.ndarray,
                Y_prev: Optional[np.ndarray] = None,
                P: Optional[np.ndarray] = None,
                alpha: float = 0.5) -> np.ndarray:
    """Input of one stacked layer: weighted features plus the random shift.

    Bottom layer: lam * X.  Deeper layers: lam * X + alpha * Y_prev @ P.
    """
    Xw = np.atleast_2d(X) * lam
    if Y_prev is None:
        return Xw
    return Xw + alpha * (np.atleast_2d(Y_prev) @ P)


class StackedNetwork:
    """Self-organizing stack of eSCN layers driven by drift detection."""

    def __init__(self, n: int, m: int, config: StackConfig = None, seed: int = 0):
        self.n = n
        self.m = m
        self.config = config or StackConfig()
        self.links: List[LayerLink] = []
        self.weighter = FeatureWeighter(n)
        self.lam = np.ones(n)
        self.warning_buffer: List[DataChunk] = []
        self.detector: Optional[DriftDetector] = None
        self.chunks_seen = 0
        root = np.random.SeedSequence(seed)
        proj_seq, scn_seq = root.spawn(2)
        self._proj_rng = np.random.default_rng(proj_seq)
        self._scn = ScnConfigurer(params=self.config.scn, seed_seq=scn_seq)
        self.scn_log: list = []

    # ----- structure ----------------------------------------------------

    @property
    def depth(self) -> int:
        return len(self.links)

    @property
    def total_nodes(self) -> int:
        return sum(link.layer.n_nodes for link in self.links)

    def _new_link(self, stamp: int) -> LayerLink:
        layer = EscnLayer(n=self.n, m=self.m, cfg=self.config.escn)
        layer.scn = self._scn
        P = self._proj_rng.uniform(0.0, 1.0, size=(self.m, self.n))
        return LayerLink(layer=layer, P=P, birth_stamp=stamp)

    # ----- inference ----------------------------------------------------

    def forward(self, X: np.ndarray):
        """Per-layer outputs, final scores and final classes for a batch.

        A sample no layer covers yields a zero score vector and an abstain
        prediction of class 1 (flagged in the no-coverage count).
        """
        if self.depth < 1:
            raise ValueError("stack has no layers")
        X = np.atleast_2d(X)
        outputs = []
        y_prev = None
        no_cover_last = np.zeros(X.shape[0], dtype=bool)
        for d, link in enumerate(self.links):
            Xd = layer_input(X, self.lam,
                             Y_prev=y_prev if d > 0 else None,
                             P=link.P, alpha=self.config.alpha)
            y, no_cover = link.layer.infer(Xd)
            outputs.append(y)
            y_prev = y
            no_cover_last = no_cover
        classes = predict_class(outputs[-1])
        classes = np.where(no_cover_last, 1, classes)
        return outputs, outputs[-1], classes

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.forward(X)[2]

    # ----- training -----------------------------------------------------

    def _ensure_detector(self, chunk_size: int) -> None:
        if self.detector is None:
            cfg = self.config.drift or DriftConfig(
                tau=self.config.tau_chunks * chunk_size)
            self.config.drift = cfg
            self.detector = DriftDetector(cfg=cfg)

    def _train_layer_on(self, link: LayerLink, chunks: List[DataChunk],
                        stamp: int) -> dict:
        """Train one layer on a list of chunks with layer inputs recomputed
        through the frozen upstream layers."""
        d = self.links.index(link)
        stats = None
        for chunk in chunks:
            if d == 0:
                Xd = layer_input(chunk.X, self.lam)
            else:
                y_prev = self._upstream_output(chunk.X, d)
                Xd = layer_input(chunk.X, self.lam, Y_prev=y_prev,
                                 P=link.P, alpha=self.config.alpha)
            stats = link.layer.train_chunk(Xd, chunk.Y, stamp=stamp)
            for ev in stats["scn_events"]:
                self.scn_log.append((stamp, d, ev))
        return stats or {}

    def _upstream_output(self, X: np.ndarray, depth_index: int) -> np.ndarray:
        y_prev = None
        for d in range(depth_index):
            link = self.links[d]
            Xd = layer_input(X, self.lam,
                             Y_prev=y_prev if d > 0 else None,
                             P=link.P, alpha=self.config.alpha)
            y_prev, _ = link.layer.infer(Xd)
        return y_prev

    def prune_layers(self, outputs: List[np.ndarray], stamp: int) -> int:
        """Merge one pair of layers whose chunk outputs carry the same
        information (mean output MICI below the merge threshold).  The
        younger layer of the pair is removed; layers born this chunk are
        exempt for one chunk."""
        if self.depth < 2:
            return 0
        for i in range(self.depth):
            for k in range(i + 1, self.depth):
                sim = np.mean([mici_series(outputs[i][:, o], outputs[k][:, o])
                               for o in range(self.m)])
                if sim <= self.config.delta_merge:
                    younger = i if self.links[i].birth_stamp > self.links[k].birth_stamp else k
                    if self.links[younger].birth_stamp >= stamp:
                        continue
                    del self.links[younger]
                    return 1
        return 0

    def process_chunk(self, chunk: DataChunk) -> ChunkReport:
        """One full training step of the stack on a labeled chunk."""
        if chunk.Y is None:
            raise ValueError("training requires a labeled chunk")
        stamp = self.chunks_seen
        self.chunks_seen += 1
        N = chunk.n_samples
        self._ensure_detector(N)

        # 1. feature accumulators and shared input weights
        self.weighter.update(chunk.X)
        self.lam = self.weighter.weights()

        merged = 0
        scn_start = len(self.scn_log)
        if self.depth == 0:
            # 2. bootstrap the first layer
            self.links.append(self._new_link(stamp))
            self.detector.samples_seen += N
            stats = self._train_layer_on(self.links[0], [chunk], stamp)
            verdict = DriftVerdict(drift_mod.STABLE)
            acc = None
            n_nocover = 0
        else:
            # 3. forward pass and drift detection on the pre-update error
            outputs, _, classes = self.forward(chunk.X)
            truth = chunk.labels
            errors = (classes != truth).astype(float)
            acc = float(1.0 - errors.mean())
            n_nocover = int(np.sum(np.all(outputs[-1] == 0.0, axis=1)))
            verdict = self.detector.step(errors)
            if verdict.status == drift_mod.DRIFT:
                # 4. new top layer trained on buffered warning data + chunk
                link = self._new_link(stamp)
                self.links.append(link)
                stats = self._train_layer_on(
                    link, self.warning_buffer + [chunk], stamp)
                self.warning_buffer = []
            elif verdict.status == drift_mod.WARNING:
                # 5. accumulate; no parameter updates in the warning phase
                self.warning_buffer.append(chunk)
                stats = {}
            else:
                # 6. stable: update the deepest layer only
                stats = self._train_layer_on(self.links[-1], [chunk], stamp)
                self.warning_buffer = []
            # 7. layer merging on this chunk's outputs
            outputs_now, _, _ = self.forward(chunk.X)
            merged = self.prune_layers(outputs_now, stamp)

        return ChunkReport(stamp=stamp, verdict=verdict, depth=self.depth,
                           total_nodes=self.total_nodes, lam=self.lam.copy(),
                           accuracy_before_update=acc, layer_stats=stats,
                           merged=merged,
                           scn_events=self.scn_log[scn_start:],
                           no_coverage=n_nocover)

    # ----- serialization ------------------------------------------------

    def state(self) -> dict:
        return {
            "version": 1,
            "n": self.n, "m": self.m, "config": self.config,
            "lam": self.lam.copy(),
            "links": [(lk.layer.state(), lk.P.copy(), lk.birth_stamp)
                      for lk in self.links],
            "weighter": (self.weighter.count, self.weighter.sums.copy(),
                         self.weighter.cross.copy()),
            "detector": None if self.detector is None else
                        (self.detector.samples_seen,
                         [w.copy() for w in self.detector.window]),
            "chunks_seen": self.chunks_seen,
            "scn_seed_seq": self._scn.seed_seq,
            "proj_rng_state": self._proj_rng.bit_generator.state,
            "buffer": [(c.X.copy(), c.Y.copy(), c.stamp)
                       for c in self.warning_buffer],
        }

    def save(self, path: str) -> None:
        with open(path, "wb") as fh:
            pickle.dump(self.state(), fh)

    @classmethod
    def load(cls, path: str) -> "StackedNetwork":
        with open(path, "rb") as fh:
            state = pickle.load(fh)
        return cls.from_state(state)

    @classmethod
    def from_state(cls, state: dict) -> "StackedNetwork":
        net = cls(state["n"], state["m"], config=state["config"])
        net._scn = ScnConfigurer(params=state["config"].scn,
                                 seed_seq=state["scn_seed_seq"])
        net._proj_rng.bit_generator.state = state["proj_rng_state"]
        net.lam = np.asarray(state["lam"])
        for layer_state, P, birth in state["links"]:
            layer = EscnLayer.from_state(layer_state, scn=net._scn)
            net.links.append(LayerLink(layer=layer, P=P, birth_stamp=birth))
        cnt, sums, cross = state["weighter"]
        net.weighter.count, net.weighter.sums, net.weighter.cross = cnt, sums, cross
        if state["detector"] is not None:
            seen, window = state["detector"]
            net._ensure_detector(1)
            net.detector.samples_seen = seen
            net.detector.window = window
        net.chunks_seen = state["chunks_seen"]
        net.warning_buffer = [DataChunk(X, Y, stamp=s)
                              for X, Y, s in state["buffer"]]
        return net
