"""Drift detector demo: stable / warning / drift on synthetic error streams.

The detector watches a 0/1 error series chunk by chunk.  An abrupt jump in
the error rate trips DRIFT almost immediately; a slow ramp usually passes
through the WARNING band first; a stationary stream stays STABLE.
"""

import numpy as np

from dsscn import DriftConfig, DriftDetector

CHUNK = 200


def feed(name, rates, seed=0):
    rng = np.random.default_rng(seed)
    det = DriftDetector(cfg=DriftConfig(tau=100 * CHUNK))
    print(f"--- {name} ---")
    for k, p in enumerate(rates):
        errors = (rng.random(CHUNK) < p).astype(float)
        v = det.step(errors)
        if v.status != "STABLE":
            print(f"  chunk {k:3d}  error rate {p:.2f}  -> {v.status}"
                  f"  (dist {v.dist:.4f}, bounds [{v.eps_warning:.4f},"
                  f" {v.eps_drift:.4f}])")
    print(f"  done: {k + 1} chunks")


# stationary stream: nothing should fire
feed("stationary 10% errors", [0.10] * 100, seed=1)

# abrupt jump at chunk 50
feed("abrupt jump 10% -> 50%", [0.10] * 50 + [0.50] * 30, seed=2)

# slow ramp: the distance statistic creeps through the warning band
ramp = list(np.linspace(0.05, 0.30, 120))
feed("gradual ramp 5% -> 30%", [0.05] * 40 + ramp, seed=8)
