"""labelloop: pool-based active learning on pre-extracted feature embeddings.

The library trains a one-layer softmax head on frozen embeddings and runs
label-budgeted query/label cycles. The flagship strategy combines a
margin-entropy uncertainty score with sub-array slicing of the ranked pool and
a pseudo-label diversity guard; classic baselines (random, margin, entropy,
varratio, ceal, kmeans) share the same loop for comparison.
"""

from .data import (
    ConfigError,
    EmbeddingDataset,
    FormatError,
    SplitSpec,
    generate_synthetic,
    make_rng,
    read_embedding_file,
    split,
    write_embedding_file,
)
from .linear import ColdStartRequired, LinearHead, TrainConfig, init_xavier, predict_proba, train
from .cluster import KMeansResult, cold_start_query, kmeans
from .uncertainty import entropy, margin, margin_entropy, varratio
from .strategies import QueryPlan, RankedPool, baseline_select, mal_select, rank_pool
from .engine import (
    AblationFlags,
    CealSchedule,
    Oracle,
    PoolState,
    RunRecord,
    ceal_augment,
    evaluate,
    run_al,
    summarize,
)

__version__ = "0.1.0"
