"""Base learner demo: self-organizing fuzzy-neural classifier on one concept.

A single evolving layer is trained chunk by chunk on a stationary SEA
stream.  Watch it grow hidden nodes where the data demands coverage, prune
the ones whose firing stops tracking the target, and converge above 95%
accuracy with a handful of nodes.
"""

import numpy as np

from dsscn import EscnLayer, ScnConfigurer, ScnParams, generate_sea, one_hot_encode

rng_seed = 5
X, labels = generate_sea(10_000, [(0, 4.0)], seed=rng_seed)
Y = one_hot_encode(labels, 2)

layer = EscnLayer(n=3, m=2)
layer.scn = ScnConfigurer(params=ScnParams(),
                          seed_seq=np.random.SeedSequence(rng_seed))

CHUNK = 500
print("stamp  acc_before  nodes  added  replaced  pruned  scopes")
for stamp, lo in enumerate(range(0, X.shape[0], CHUNK)):
    Xc, Yc = X[lo:lo + CHUNK], Y[lo:lo + CHUNK]
    if layer.n_nodes:
        acc = np.mean(layer.predict(Xc) == labels[lo:lo + CHUNK])
        acc_str = f"{acc:.3f}"
    else:
        acc_str = "  -  "
    stats = layer.train_chunk(Xc, Yc, stamp=stamp)
    scopes = sorted({ev.scope_used for ev in stats["scn_events"]})
    print(f"{stamp:5d}  {acc_str:>10}  {stats['nodes']:5d}  {stats['added']:5d}"
          f"  {stats['replaced']:8d}  {stats['pruned']:6d}  {scopes}")

print()
print(f"final structure: {layer.n_nodes} interval type-2 nodes, each with a")
print("functional-link readout updated by fuzzily weighted recursive least")
print("squares.  New-node shapes were drawn from the scope ladder and kept")
print("only when the robustness screen admitted them.")
