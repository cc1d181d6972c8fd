"""Higher-order link prediction: score open triangles by how likely they close."""

from .candidates import closure_labels, open_triangles
from .hodge import (
    HodgeOperators,
    MissingEdgeError,
    build_hodge,
    hodge_decompose,
    hodge_operators,
    simplicial_ppr,
    sppr_triple_scores,
)
from .paths import (
    DivergenceError,
    IsolatedNodeError,
    PairScores,
    katz_matrix,
    katz_scores,
    ppr_matrix,
    ppr_scores,
    spectral_norm,
)
from .ranking import ScoreFunction, ScoreSet, rank_candidates, score_triples
from .scores import (
    adamic_adar,
    common_neighbors,
    generalized_mean,
    jaccard,
    pref_attach_projected,
    pref_attach_simplicial,
)
from .supervised import (
    FEATURE_NAMES,
    LogisticModel,
    extract_features,
    fit_logistic,
    logistic_loss,
    train_supervised,
)
