"""Pool-based active-learning simulator with a memory-limited oracle.

Query selection weighs how informative an observation is (predictive
entropy) against how likely the annotator still remembers it (exponential
memory decay), under a fixed query budget.  Includes baselines, a
brute-force optimality verifier, a synthetic dataset generator, and a
reproducible experiment harness.
"""

from .bruteforce import EnumerationReport, count_ordered_subsets, optimal_session, verify_mB_approximation
from .classifier import SoftmaxClassifier, accuracy, fit_labeled_set
from .data import (
    ActivityVocabulary,
    LabeledSet,
    Observation,
    Pool,
    RngStream,
    draw_initial_labels,
    load_dataset_csv,
    save_dataset_csv,
    split_pool,
)
from .experiment import ExperimentConfig, ResultRecord, aggregate, load_config, run_sweep
from .memory import (
    DEFAULT_RETENTION_LEVELS,
    FIVE_RETENTION_LEVELS,
    MemoryModel,
    PerfectMemory,
    RetentionLevel,
    calibrate_strength,
    retention_range,
)
from .oracle import PerfectOracle, QueryResponse, SimulatedOracle
from .strategies import (
    STRATEGIES,
    GainScore,
    SessionSeeds,
    SessionTrace,
    entropy,
    gain,
    run_session,
    select_next,
)
from .synthetic import SyntheticSpec, generate

__version__ = "0.1.0"

__all__ = [
    "ActivityVocabulary", "DEFAULT_RETENTION_LEVELS", "EnumerationReport", "ExperimentConfig",
    "FIVE_RETENTION_LEVELS", "GainScore", "LabeledSet", "MemoryModel", "Observation",
    "PerfectMemory", "PerfectOracle", "Pool", "QueryResponse", "ResultRecord", "RngStream",
    "STRATEGIES", "SessionSeeds", "SessionTrace", "SimulatedOracle", "SoftmaxClassifier",
    "SyntheticSpec", "accuracy", "aggregate", "calibrate_strength", "count_ordered_subsets",
    "draw_initial_labels", "entropy", "fit_labeled_set", "gain", "generate", "load_config",
    "load_dataset_csv", "optimal_session", "retention_range", "run_session", "run_sweep",
    "save_dataset_csv", "select_next", "split_pool", "verify_mB_approximation",
]
