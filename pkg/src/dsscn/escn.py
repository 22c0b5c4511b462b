"""Evolving base learner: interval type-2 multivariate-Gaussian functional-link
network with density-driven node growing, relevance-driven node pruning and
fuzzily weighted generalized recursive least-squares output learning.
"""

from __future__ import annotations

import pickle
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.stats import chi2

from .feature_weighting import mici_series


@dataclass
class EscnConfig:
    q: float = 0.5               # type-reduction design coefficient, per output
    omega: float = 1e5           # initial output-covariance scale
    rho_decay: float = 1e-5      # FWGRLS weight-decay factor
    delta_c_factor: float = 0.05  # centroid spread as fraction of chunk feature std
    p_replace: float = 0.05      # chi-square critical level for node replacement
    theta_prune: float = 2.0     # std-deviations rule for node relevance pruning


@dataclass
class HiddenNode:
    """One interval type-2 multivariate Gaussian unit with functional-link readout."""

    c_lower: np.ndarray   # (n,)
    c_upper: np.ndarray   # (n,)
    inv_cov: np.ndarray   # (n, n) symmetric positive-definite
    W: np.ndarray         # (2n+1, m) output weights
    Omega: np.ndarray     # (2n+1, 2n+1) output covariance
    birth_stamp: int = 0

    def __post_init__(self):
        if np.any(self.c_lower > self.c_upper):
            raise ValueError("c_lower must be <= c_upper elementwise")

    @property
    def c_mid(self) -> np.ndarray:
        return 0.5 * (self.c_lower + self.c_upper)


@dataclass
class DensityStats:
    """Running accumulators for the recursive density estimate."""

    count: int = 0
    mean: np.ndarray = None          # (n,)
    mean_sq_norm: float = 0.0        # running mean of ||x||^2

    def update(self, x: np.ndarray) -> None:
        x = np.asarray(x, dtype=float)
        self.count += 1
        if self.mean is None:
            self.mean = np.zeros_like(x)
        k = self.count
        self.mean = self.mean + (x - self.mean) / k
        self.mean_sq_norm += (float(x @ x) - self.mean_sq_norm) / k


def density(stats: DensityStats, x: np.ndarray) -> float:
    """Recursive density D(x) = 1 / (1 + mean_k ||x - x_k||^2) in closed form."""
    if stats.count < 1:
        raise ValueError("density stats have seen no samples")
    x = np.asarray(x, dtype=float)
    d = x - stats.mean
    msd = float(d @ d) + stats.mean_sq_norm - float(stats.mean @ stats.mean)
    return 1.0 / (1.0 + max(msd, 0.0))


def chebyshev_expand(x: np.ndarray) -> np.ndarray:
    """Second-order Chebyshev functional expansion with leading intercept.

    x_e = [1, T1(x_1), T2(x_1), ..., T1(x_n), T2(x_n)] with T1(v) = v and
    T2(v) = 2 v^2 - 1.
    """
    x = np.asarray(x, dtype=float).ravel()
    out = np.empty(2 * x.size + 1)
    out[0] = 1.0
    out[1::2] = x
    out[2::2] = 2.0 * x * x - 1.0
    return out


def expand_batch(X: np.ndarray) -> np.ndarray:
    """Chebyshev expansion of an (N, n) batch into (N, 2n+1)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    N, n = X.shape
    out = np.empty((N, 2 * n + 1))
    out[:, 0] = 1.0
    out[:, 1::2] = X
    out[:, 2::2] = 2.0 * X * X - 1.0
    return out


def project_radii(node: HiddenNode, x: np.ndarray) -> np.ndarray:
    """Per-dimension radii of the one-dimensional Gaussian projection.

    sigma_j = r_tilde * sqrt(inv_cov[j, j]) where r_tilde is the mean of the
    Mahalanobis distances of x to the lower and upper centroids.
    """
    x = np.asarray(x, dtype=float)
    dl = x - node.c_lower
    du = x - node.c_upper
    r_lower = np.sqrt(max(float(dl @ node.inv_cov @ dl), 0.0))
    r_upper = np.sqrt(max(float(du @ node.inv_cov @ du), 0.0))
    r_tilde = 0.5 * (r_lower + r_upper)
    diag = np.diag(node.inv_cov)
    if np.any(diag <= 0.0):
        raise ValueError("inverse covariance has a non-positive diagonal")
    return r_tilde * np.sqrt(diag)


def _gauss(c, sigma, x):
    """Gaussian membership with the sigma = 0 degenerate case as an indicator."""
    if sigma <= 0.0:
        return 1.0 if x == c else 0.0
    z = (x - c) / sigma
    return float(np.exp(-0.5 * z * z))


def node_activation(node: HiddenNode, x: np.ndarray):
    """Interval firing (lower, upper) of one node at a (weighted) input."""
    x = np.asarray(x, dtype=float)
    sigma = project_radii(node, x)
    upper = 1.0
    lower = 1.0
    for j in range(x.size):
        cl, cu, s, v = node.c_lower[j], node.c_upper[j], sigma[j], x[j]
        if v < cl:
            mu_up = _gauss(cl, s, v)
        elif v <= cu:
            mu_up = 1.0
        else:
            mu_up = _gauss(cu, s, v)
        mid = 0.5 * (cl + cu)
        if v <= mid:
            mu_lo = _gauss(cu, s, v)
        else:
            mu_lo = _gauss(cl, s, v)
        upper *= mu_up
        lower *= min(mu_lo, mu_up)
    return lower, upper


def batch_activation(node: HiddenNode, X: np.ndarray):
    """Vectorized interval firing over an (N, n) batch -> (lower, upper) arrays."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    dl = X - node.c_lower
    du = X - node.c_upper
    r_lower = np.sqrt(np.clip(np.einsum("ij,jk,ik->i", dl, node.inv_cov, dl), 0.0, None))
    r_upper = np.sqrt(np.clip(np.einsum("ij,jk,ik->i", du, node.inv_cov, du), 0.0, None))
    r_tilde = 0.5 * (r_lower + r_upper)
    sigma = r_tilde[:, None] * np.sqrt(np.diag(node.inv_cov))[None, :]

    def gauss(c, s, v):
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(s > 0.0, (v - c) / np.where(s > 0.0, s, 1.0), np.inf)
        out = np.where(s > 0.0, np.exp(-0.5 * z * z), (v == c).astype(float))
        return out

    cl, cu = node.c_lower, node.c_upper
    mu_up = np.where(X < cl, gauss(cl, sigma, X),
                     np.where(X <= cu, 1.0, gauss(cu, sigma, X)))
    mid = 0.5 * (cl + cu)
    mu_lo = np.where(X <= mid, gauss(cu, sigma, X), gauss(cl, sigma, X))
    mu_lo = np.minimum(mu_lo, mu_up)
    return mu_lo.prod(axis=1), mu_up.prod(axis=1)


def type_reduce(lower, upper, q):
    """Crisp firing from the interval: (1 - q) * upper + q * lower."""
    return (1.0 - q) * upper + q * lower


@dataclass
class EscnLayer:
    """One base learner: a set of hidden nodes plus shared layer state."""

    n: int
    m: int
    cfg: EscnConfig = field(default_factory=EscnConfig)
    nodes: List[HiddenNode] = field(default_factory=list)
    q: np.ndarray = None                  # (m,) type-reduction coefficients
    density_stats: DensityStats = field(default_factory=DensityStats)
    scn: "object" = None                  # ScnConfigurer, set by the builder

    def __post_init__(self):
        if self.q is None:
            self.q = np.full(self.m, self.cfg.q)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    # ----- inference ---------------------------------------------------

    def firings(self, X: np.ndarray):
        """(N, R) lower and upper firing matrices over a batch."""
        X = np.atleast_2d(X)
        R = self.n_nodes
        lo = np.empty((X.shape[0], R))
        up = np.empty((X.shape[0], R))
        for i, node in enumerate(self.nodes):
            lo[:, i], up[:, i] = batch_activation(node, X)
        return lo, up

    def infer(self, X: np.ndarray):
        """Layer output (N, m) and a per-sample no-coverage flag (N,)."""
        if self.n_nodes < 1:
            raise ValueError("layer has no nodes")
        X = np.atleast_2d(X)
        lo, up = self.firings(X)
        xe = expand_batch(X)
        beta = np.stack([xe @ node.W for node in self.nodes], axis=1)  # (N, R, m)
        denom = (lo + up).sum(axis=1)                                  # (N,)
        no_cover = denom <= 0.0
        safe = np.where(no_cover, 1.0, denom)
        num = ((1.0 - self.q)[None, None, :] * lo[:, :, None] * beta
               + self.q[None, None, :] * up[:, :, None] * beta).sum(axis=1)
        y = num / safe[:, None]
        y[no_cover] = 0.0
        return y, no_cover

    def predict(self, X: np.ndarray) -> np.ndarray:
        y, _ = self.infer(X)
        return predict_class(y)

    # ----- structural learning -----------------------------------------

    def crisp_firing_single(self, x: np.ndarray) -> np.ndarray:
        """(R,) crisp firings of a single sample (mean q across outputs)."""
        qbar = float(self.q.mean())
        out = np.empty(self.n_nodes)
        for i, node in enumerate(self.nodes):
            lo, up = node_activation(node, x)
            out[i] = type_reduce(lo, up, qbar)
        return out

    def grow_check(self, x: np.ndarray):
        """Decide ADD / REPLACE(nearest) / NONE for an incoming sample.

        ADD fires when the sample's recursive density exceeds every node
        center's density (high summarization power) or undercuts all of them
        (coverage expansion).  If the candidate would sit on top of an
        existing node — crisp firing at the nearest node above the chi-square
        threshold — the nearest node is recentered instead of duplicated.
        """
        if self.n_nodes == 0:
            return ("ADD", None)
        d_x = density(self.density_stats, x)
        d_nodes = np.array([density(self.density_stats, nd.c_mid) for nd in self.nodes])
        if not (d_x > d_nodes.max() or d_x < d_nodes.min()):
            return ("NONE", None)
        firing = self.crisp_firing_single(x)
        nearest = int(np.argmax(firing))
        tau_b = float(np.exp(-chi2.ppf(self.cfg.p_replace, df=self.n)))
        if firing[nearest] >= tau_b:
            return ("REPLACE", nearest)
        return ("ADD", None)

    def prune_check(self, crisp: np.ndarray, Y: np.ndarray) -> List[int]:
        """Relevance pruning over the chunk window.

        relevance s_i = mean over outputs of MICI(firing series of node i,
        target column); high MICI = weak correlation with the target.  Nodes
        with s_i above mean + theta_prune * std (and at least one chunk old)
        are pruned; the layer never shrinks below one node.
        """
        R = self.n_nodes
        if R < 2:
            return []
        s = np.array([
            np.mean([mici_series(crisp[:, i], Y[:, o]) for o in range(self.m)])
            for i in range(R)
        ])
        thresh = s.mean() + self.cfg.theta_prune * s.std()
        doomed = [i for i in range(R) if s[i] > thresh]
        return doomed[: R - 1]

    def fwgrls_update(self, node: HiddenNode, x_e: np.ndarray,
                      lam: float, y: np.ndarray) -> None:
        """Per-node FWGRLS step weighted by the normalized firing lam.

        With rho_decay = 0 this is exactly fuzzily weighted RLS; the decay
        term shrinks the output weights toward zero.
        """
        if lam <= 0.0:
            return
        x_e = np.asarray(x_e, dtype=float)
        Ox = node.Omega @ x_e                       # (p,)
        denom = 1.0 / lam + float(x_e @ Ox)
        K = Ox / denom                              # (p,)
        node.Omega = node.Omega - np.outer(K, x_e @ node.Omega)
        node.Omega = 0.5 * (node.Omega + node.Omega.T)  # keep symmetric
        err = y - x_e @ node.W                      # (m,)
        node.W = node.W - self.cfg.rho_decay * (node.Omega @ node.W) \
            + np.outer(K, err)

    def _residuals(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        if self.n_nodes == 0:
            return Y.copy()
        y, _ = self.infer(X)
        return Y - y

    def _add_node(self, x: np.ndarray, X_window: np.ndarray,
                  Y_window: np.ndarray, delta_c: np.ndarray, stamp: int):
        residuals = self._residuals(X_window, Y_window)
        params, outcome = self.scn.configure_node(
            x_center=x, window=X_window, residuals=residuals,
            R=self.n_nodes, q=self.q, delta_c=delta_c)
        p = 2 * self.n + 1
        if self.n_nodes > 0:
            winner = int(np.argmax(self.crisp_firing_single(x)))
            W0 = self.nodes[winner].W.copy()
        else:
            W0 = np.zeros((p, self.m))
        node = HiddenNode(c_lower=params["c_lower"], c_upper=params["c_upper"],
                          inv_cov=params["inv_cov"], W=W0,
                          Omega=self.cfg.omega * np.eye(p), birth_stamp=stamp)
        self.nodes.append(node)
        return outcome

    def train_chunk(self, X: np.ndarray, Y: np.ndarray, stamp: int = 0) -> dict:
        """One pass over a labeled (already weighted/shifted) chunk.

        Per sample: update density stats, run the grow check (ADD configures a
        new node through the SCN strategy, REPLACE recenters the nearest
        node), then apply FWGRLS to every node.  Node pruning runs once at
        chunk end over the chunk's firing series.
        """
        X = np.atleast_2d(X)
        Y = np.atleast_2d(Y)
        if Y.shape[0] != X.shape[0]:
            raise ValueError("chunk must be labeled")
        delta_c = self.cfg.delta_c_factor * X.std(axis=0)
        added = replaced = 0
        scn_events = []
        qbar = float(self.q.mean())
        for t in range(X.shape[0]):
            x, y = X[t], Y[t]
            self.density_stats.update(x)
            action, target = self.grow_check(x)
            if action == "ADD":
                outcome = self._add_node(x, X, Y, delta_c, stamp)
                scn_events.append(outcome)
                added += 1
            elif action == "REPLACE":
                node = self.nodes[target]
                node.c_lower = x - delta_c
                node.c_upper = x + delta_c
                replaced += 1
            # local FWGRLS update on every node
            x_e = expand_batch(x[None, :])[0]
            crisp = np.empty(self.n_nodes)
            for i, node in enumerate(self.nodes):
                lo, up = node_activation(node, x)
                crisp[i] = type_reduce(lo, up, qbar)
            total = crisp.sum()
            if total > 0.0:
                lams = crisp / total
                for i, node in enumerate(self.nodes):
                    self.fwgrls_update(node, x_e, float(lams[i]), y)
        # chunk-end relevance pruning
        lo, up = self.firings(X)
        crisp_series = type_reduce(lo, up, qbar)
        mature = set(i for i, nd in enumerate(self.nodes) if nd.birth_stamp < stamp)
        doomed = [i for i in self.prune_check(crisp_series, Y) if i in mature]
        pruned = len(doomed)
        if doomed and self.n_nodes - pruned >= 1:
            self.nodes = [nd for i, nd in enumerate(self.nodes) if i not in doomed]
        else:
            pruned = 0
        pred = self.predict(X)
        err = float(np.mean(pred != np.argmax(Y, axis=1) + 1))
        return {"added": added, "replaced": replaced, "pruned": pruned,
                "train_error": err, "nodes": self.n_nodes,
                "scn_events": scn_events}

    # ----- serialization -----------------------------------------------

    def state(self) -> dict:
        return {
            "version": 1,
            "n": self.n, "m": self.m, "q": self.q.copy(),
            "cfg": self.cfg,
            "nodes": [(nd.c_lower.copy(), nd.c_upper.copy(), nd.inv_cov.copy(),
                       nd.W.copy(), nd.Omega.copy(), nd.birth_stamp)
                      for nd in self.nodes],
            "density": (self.density_stats.count,
                        None if self.density_stats.mean is None
                        else self.density_stats.mean.copy(),
                        self.density_stats.mean_sq_norm),
        }

    def snapshot(self) -> bytes:
        return pickle.dumps(self.state())

    @classmethod
    def from_state(cls, state: dict, scn=None) -> "EscnLayer":
        layer = cls(n=state["n"], m=state["m"], cfg=state["cfg"],
                    q=np.asarray(state["q"]))
        layer.scn = scn
        for cl, cu, ic, W, Om, bs in state["nodes"]:
            layer.nodes.append(HiddenNode(cl, cu, ic, W, Om, bs))
        cnt, mean, msn = state["density"]
        layer.density_stats = DensityStats(cnt, mean, msn)
        return layer


def predict_class(y: np.ndarray) -> np.ndarray:
    """Argmax class (1-based), ties to the lowest index.

    Single-output layers use the 0.5 threshold convention: class 1 when
    y >= 0.5, else class 2.
    """
    y = np.atleast_2d(y)
    if y.shape[1] == 1:
        return np.where(y[:, 0] >= 0.5, 1, 2)
    return np.argmax(y, axis=1) + 1
