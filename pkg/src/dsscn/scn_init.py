"""Stochastic-configuration random assignment of new-node inverse covariance.

A new hidden node's inverse covariance matrix is drawn from a ladder of
symmetric scopes [-xi, xi].  Candidates are screened by a per-output
robustness inequality computed over the current chunk; the first scope with
an admissible candidate wins and the candidate maximizing total robustness
is installed.  If every scope fails, the globally best candidate is used as
a fallback.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

DEFAULT_SCOPES = (0.1, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 30.0, 50.0, 100.0, 150.0, 200.0)


@dataclass
class ScnParams:
    t_max: int = 20
    scopes: tuple = DEFAULT_SCOPES
    r: float = 0.9

    def __post_init__(self):
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        ss = tuple(float(s) for s in self.scopes)
        if list(ss) != sorted(ss) or len(set(ss)) != len(ss) or any(s <= 0 for s in ss):
            raise ValueError("scopes must be strictly ascending positives")
        if not (0.0 < self.r < 1.0):
            raise ValueError("r must be in (0, 1)")
        self.scopes = ss


@dataclass
class ScnOutcome:
    inv_cov: np.ndarray
    scope_used: float
    zeta_total: float
    satisfied: bool


def sample_inverse_covariance(n: int, xi: float, rng: np.random.Generator) -> np.ndarray:
    """Random symmetric positive-definite matrix with entries of scale xi.

    Built from a lower-triangular factor (off-diagonal uniform on [-xi, xi],
    diagonal uniform on (0, xi]) so positive-definiteness holds by
    construction; L L^T / xi keeps entry magnitudes O(xi).
    """
    if xi <= 0.0:
        raise ValueError("xi must be > 0")
    L = np.zeros((n, n))
    tril = np.tril_indices(n, k=-1)
    L[tril] = rng.uniform(-xi, xi, size=len(tril[0]))
    diag = xi * (1.0 - rng.uniform(0.0, 1.0, size=n))  # in (0, xi]
    L[np.diag_indices(n)] = diag
    return (L @ L.T) / xi


def robustness(g: np.ndarray, e_o: np.ndarray, r: float, mu: float) -> float:
    """Per-output robustness of a candidate node over the window.

    zeta_o = (e_o . g)^2 / (g . g) - (1 - r - mu) * (e_o . e_o).  A candidate
    is admissible when zeta_o >= 0 for every output.
    """
    g = np.asarray(g, dtype=float)
    gg = float(g @ g)
    if gg <= 0.0:
        raise ValueError("dead candidate: zero firing over the window")
    e_o = np.asarray(e_o, dtype=float)
    proj = float(e_o @ g)
    return proj * proj / gg - (1.0 - r - mu) * float(e_o @ e_o)


@dataclass
class ScnConfigurer:
    """Stateful runner of the SCN configuration loop with its own rng stream.

    Candidate draws come from per-candidate substreams spawned off a root
    seed sequence so the outcome is independent of evaluation order.
    """

    params: ScnParams = field(default_factory=ScnParams)
    seed_seq: np.random.SeedSequence = None
    _event: int = 0

    def __post_init__(self):
        if self.seed_seq is None:
            self.seed_seq = np.random.SeedSequence(0)

    def configure_node(self, x_center: np.ndarray, window: np.ndarray,
                       residuals: np.ndarray, R: int, q: np.ndarray,
                       delta_c: np.ndarray):
        """Pick the inverse covariance for a node centered at x_center.

        Evaluates t_max candidates per scope, ascending; the crisp firing of
        each candidate over the window is screened by the robustness
        inequality with mu = (1 - r) / (R + 1).  On scope failure the
        contraction parameter is relaxed by a random increment and the next
        scope is tried.  Returns (node params, ScnOutcome).
        """
        from .escn import HiddenNode, batch_activation, type_reduce

        window = np.atleast_2d(window)
        residuals = np.atleast_2d(residuals)
        m = residuals.shape[1]
        n = window.shape[1]
        c_lower = x_center - delta_c
        c_upper = x_center + delta_c
        qbar = float(np.mean(q))
        r = self.params.r
        event_seq = self.seed_seq.spawn(1)[0]
        self._event += 1
        best_global = None  # (zeta_total, inv_cov, scope)
        n_scopes = len(self.params.scopes)
        child_seqs = event_seq.spawn(n_scopes * self.params.t_max + 1)
        relax_rng = np.random.default_rng(child_seqs[-1])
        for s_idx, xi in enumerate(self.params.scopes):
            admitted = []  # (zeta_total, inv_cov)
            for k in range(self.params.t_max):
                rng = np.random.default_rng(child_seqs[s_idx * self.params.t_max + k])
                inv_cov = sample_inverse_covariance(n, xi, rng)
                cand = HiddenNode(c_lower=c_lower, c_upper=c_upper,
                                  inv_cov=inv_cov,
                                  W=np.zeros((2 * n + 1, m)),
                                  Omega=np.eye(2 * n + 1))
                lo, up = batch_activation(cand, window)
                g = type_reduce(lo, up, qbar)
                if float(g @ g) <= 0.0:
                    continue  # dead node
                mu = (1.0 - r) / (R + 1)
                zetas = [robustness(g, residuals[:, o], r, mu) for o in range(m)]
                z_total = float(np.sum(zetas))
                if best_global is None or z_total > best_global[0]:
                    best_global = (z_total, inv_cov, xi)
                if min(zetas) >= 0.0:
                    admitted.append((z_total, inv_cov))
            if admitted:
                z_total, inv_cov = max(admitted, key=lambda t: t[0])
                outcome = ScnOutcome(inv_cov=inv_cov, scope_used=xi,
                                     zeta_total=z_total, satisfied=True)
                return self._params(c_lower, c_upper, inv_cov), outcome
            # relax the contraction parameter and escalate to the next scope
            r = min(r + relax_rng.uniform(0.0, 1.0 - r), 0.999)
        if best_global is None:
            # every candidate was dead; fall back to an identity-scale draw
            rng = np.random.default_rng(child_seqs[0])
            inv_cov = sample_inverse_covariance(n, self.params.scopes[0], rng)
            best_global = (0.0, inv_cov, self.params.scopes[0])
        z_total, inv_cov, xi = best_global
        outcome = ScnOutcome(inv_cov=inv_cov, scope_used=xi,
                             zeta_total=z_total, satisfied=False)
        return self._params(c_lower, c_upper, inv_cov), outcome

    @staticmethod
    def _params(c_lower, c_upper, inv_cov):
        return {"c_lower": np.asarray(c_lower, dtype=float),
                "c_upper": np.asarray(c_upper, dtype=float),
                "inv_cov": inv_cov}
