"""Full pipeline demo: depth adapts to concept drift on a SEA stream.

The class boundary theta switches twice mid-stream.  Each switch should be
flagged as DRIFT within a stamp or two, and each confirmed drift stacks a
new layer on top, trained on the post-change data while the layers below
stay frozen.  Prequential accuracy is scored before each training step.
"""

import numpy as np

from dsscn import PREQUENTIAL, RunConfig, chunk_stream, generate_sea, run, summarize

SCHEDULE = [(0, 4.0), (10_000, 7.0), (20_000, 4.0)]
X, labels = generate_sea(30_000, SCHEDULE, seed=7)

cfg = RunConfig(protocol=PREQUENTIAL, chunk_size=500, seed=7)
report, net = run(chunk_stream(X, labels, 500), 3, 2, cfg)

print("stamp  status    acc   depth  nodes")
for r in report.rows:
    if r.status != "STABLE" or r.stamp % 10 == 0:
        acc = "  -  " if r.accuracy is None else f"{r.accuracy:.3f}"
        print(f"{r.stamp:5d}  {r.status:8s} {acc:>5}  {r.depth:5d}  {r.nodes:5d}")

s = summarize(report)
mean, std = s["classification_rate"]
print()
print(f"prequential accuracy {mean:.4f} +/- {std:.4f}")
print(f"drift verdicts at stamps {s['drift_stamps']}"
      f" (theta switched at stamps 20 and 40)")
print(f"final depth {report.rows[-1].depth}, {report.rows[-1].nodes} nodes,"
      f" scopes used {s['scopes_used']}")
