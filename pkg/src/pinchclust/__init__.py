"""Pinch-cluster graph clustering and semisupervised label prediction."""
from .errors import (
    CapacityError,
    DegenerateFoldError,
    DomainError,
    EvaluationError,
    InputError,
    PinchClustError,
)
from .graph import WeightedGraph, boundary_size, connected_components, integrate
from .tilo import (
    Comparison,
    Ordering,
    Partition,
    boundary_profile,
    compare_widths,
    extract_clusters,
    improving_move,
    is_pinch_cluster_oracle,
    local_minima,
    tilo_fixpoint,
    width_of,
)

from .semisup import BagConfig, PredictionVector, bagged_predict, propagate
from .evaluation import (
    ExperimentReport,
    FoldPlan,
    RocResult,
    cross_validate,
    make_folds,
    roc_auc,
    run_experiment,
)
from .datasets import SynthSpec, load_dataset, synth_planted, validate_stats

__version__ = "0.1.0"
