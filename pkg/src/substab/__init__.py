"""Subspace-based stability selection for linear models with correlated features.

Selection sets are compared through the column spans they generate rather
than as index sets, which makes similarity, stability, and false-positive
counts continuous in the correlation structure.  The package provides the
metrics, the subsampling machinery, a search that enumerates multiple
maximal stable feature sets, baseline selectors, synthetic benchmark
generators, an experiment harness, and a command-line interface.
"""

from ._accel import BACKEND
from .baselines import (
    cluster_selection_proportions,
    cluster_stability_selection_sps,
    hierarchical_clusters,
    selection_proportions,
    stability_selection,
)
from .baseproc import BaseProcedureConfig, fit_base, fit_l0, fit_lasso
from .fsss import SearchResult, StableModel, enumerate_all_maximal, fsss
from .harness import (
    ExperimentConfig,
    MetricRow,
    aggregate,
    compute_output_stability,
    fit_and_score,
    run_experiment,
    stability_paths,
    summary_table,
    tile_similarity,
)
from .linalg import AvgProjection, DesignMatrix, SubspaceBasis, orthonormal_basis
from .metrics import (
    BasisCache,
    cone_similarity,
    is_maximal_stable,
    normalized_similarity,
    output_stability,
    prediction_gap,
    response_similarity,
    set_stability,
    subspace_similarity,
    true_false_positives,
    worst_case_similarity,
)
from .subsampling import SelectionRecord, SubsamplePlan, make_plan, run_subsampling
from .synthetic import (
    BlockSpec,
    ClusterSpec,
    GroundTruth,
    equally_good,
    gen_benchmark_data,
    gen_block_data,
    gen_cluster_data,
    gen_path_demo_data,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    "AvgProjection",
    "BaseProcedureConfig",
    "BasisCache",
    "BlockSpec",
    "ClusterSpec",
    "DesignMatrix",
    "ExperimentConfig",
    "GroundTruth",
    "MetricRow",
    "SearchResult",
    "SelectionRecord",
    "StableModel",
    "SubsamplePlan",
    "SubspaceBasis",
    "aggregate",
    "cluster_selection_proportions",
    "cluster_stability_selection_sps",
    "compute_output_stability",
    "cone_similarity",
    "enumerate_all_maximal",
    "equally_good",
    "fit_and_score",
    "fit_base",
    "fit_l0",
    "fit_lasso",
    "fsss",
    "gen_benchmark_data",
    "gen_block_data",
    "gen_cluster_data",
    "gen_path_demo_data",
    "hierarchical_clusters",
    "is_maximal_stable",
    "make_plan",
    "normalized_similarity",
    "orthonormal_basis",
    "output_stability",
    "prediction_gap",
    "response_similarity",
    "run_experiment",
    "run_subsampling",
    "selection_proportions",
    "set_stability",
    "stability_paths",
    "stability_selection",
    "subspace_similarity",
    "summary_table",
    "tile_similarity",
    "true_false_positives",
    "worst_case_similarity",
]
