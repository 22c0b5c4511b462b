"""Evolving deep-stacked stream classifier with stochastic node configuration.

A stack of self-organizing randomized fuzzy-neural base learners whose depth,
node count and feature weights adapt online to non-stationary data streams,
plus synthetic drifting-stream generators and hold-out / prequential
evaluation harnesses.
"""

from .drift import (DriftConfig, DriftDetector, DriftVerdict, detect,
                    find_cut, hoeffding_bound, significance_schedule)
from .escn import (DensityStats, EscnConfig, EscnLayer, HiddenNode,
                   chebyshev_expand, density, expand_batch, node_activation,
                   predict_class, project_radii, type_reduce)
from .feature_weighting import (FeatureWeighter, PairStats, feature_scores,
                                input_weights, mici, mici_series, pearson)
from .harness import (HOLDOUT, PREQUENTIAL, RunConfig, RunReport, run,
                      run_holdout, run_prequential, summarize)
from .scn_init import (ScnConfigurer, ScnOutcome, ScnParams, robustness,
                       sample_inverse_covariance)
from .stack import ChunkReport, LayerLink, StackConfig, StackedNetwork, layer_input
from .streams import (DataChunk, chunk_stream, generate_hyperplane,
                      generate_sea, load_csv_stream, one_hot_encode,
                      write_csv_stream)

__version__ = "0.1.0"
