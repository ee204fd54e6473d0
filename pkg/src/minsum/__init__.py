"""Min-sum k-clustering: exact, sampling-based and label-guided solvers."""

from .errors import (
    BoundsRoundingConflict,
    DegenerateDistribution,
    DuplicateSet,
    EmptyCluster,
    EmptyPredictedCluster,
    GuessInfeasible,
    Infeasible,
    InvalidAlpha,
    InvalidLabeling,
    Mismatch,
    ParseError,
    TooLarge,
)
from .geometry import (
    CandidateCenters,
    ClusterStats,
    CostReport,
    Dataset,
    Labeling,
    cluster_stats,
    cost_report,
    kmeans_cost,
    mean,
    minsum_cost,
    minsum_cost_pairwise,
)

__version__ = "0.1.0"
