"""Feature weighting demo: redundant inputs get small weights.

We build a 4-feature stream where feature 3 is a noisy copy of feature 0 and
feature 2 is pure noise, then watch the maximal-information-compression
scores push the redundant pair's weights down while the informative,
independent columns stay at full weight.
"""

import numpy as np

from dsscn import FeatureWeighter, mici_series

rng = np.random.default_rng(0)

N = 2000
X = rng.normal(size=(N, 4))
X[:, 3] = X[:, 0] + 0.05 * rng.normal(size=N)   # near-copy of feature 0

print("pairwise MICI (low = redundant pair):")
for j in range(4):
    row = [mici_series(X[:, j], X[:, k]) for k in range(4)]
    print("  " + "  ".join(f"{v:7.4f}" for v in row))

weighter = FeatureWeighter(4)
for lo in range(0, N, 500):
    weighter.update(X[lo:lo + 500])
    w = weighter.weights()
    print(f"after {lo + 500:5d} samples  weights = "
          + np.array2string(w, precision=3))

print()
print("features 0 and 3 share almost all their information, so both are")
print("discounted; the independent features keep weight 1.0 (or close).")
