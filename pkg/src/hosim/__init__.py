"""Higher-order interaction analysis: simplicial closure and link prediction."""

from .dataset import (
    DatasetFormatError,
    DatasetSplit,
    DegenerateSplitError,
    SimplexDataset,
    TimestampedSimplex,
    filter_max_size,
    load_dataset,
    parse_dataset,
    prefix_filter,
    summary_stats,
    temporal_split,
)
from .projection import (
    IncidenceIndex,
    ProjectedGraph,
    TieStrength,
    build_incidence,
    build_projected_graph,
    graph_metrics,
)
from .triangles import classify_closed, enumerate_triangles, fraction_open
from .census import brute_force_configs, count_configs3, count_configs4
from .closure import (
    closure_over_time,
    closure_probabilities,
    compare_closure,
    lifecycle_trace,
    temporal_overlap_census,
)
from .evaluation import auc_pr, expected_random_ap, relative_auc_pr
from .generative import GenModelParams, replicate_patch, sample_model, sweep
from .egonet import extract_egonet, sample_egonets, train_domain_classifier

__version__ = "0.1.0"
