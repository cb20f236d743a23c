"""dradapt: structural complexity metrics (pairwise distance shift, mutual
neighbor consistency) and a dataset-adaptive workflow that uses them to pick
dimensionality-reduction techniques and early-terminate their hyperparameter
optimization."""

__version__ = "0.1.0"

from .complexity import complexity_features, mnc, pds
from .data import (Dataset, SyntheticSpec, generate_synthetic, load_dataset,
                   subsample, synthetic_corpus, write_dataset)
from .distance import neighbor_ranking, pairwise_distances, rank_matrix
from .drtech import hyperparameter_space, list_techniques, project, register_external
from .errors import (DegenerateInputError, DradaptError, ExternalTechniqueError,
                     ObjectiveError, ParseError, PretrainError, ProjectionError,
                     UnknownTechniqueError, ValidationError, WorkflowError)
from .optimize import bayes_optimize, make_threshold_stop, random_search
from .quality import (continuity, mrre, mrre_f1, pearson_r, score_projection,
                      spearman_rho, tnc_f1, trustworthiness)
from .regress import cross_validate, fit, predict
from .workflow import (adaptive_optimize, compare, conventional_optimize,
                       load_model_store, predict_max_accuracy, pretrain,
                       save_model_store)

__all__ = [
    "__version__",
    "Dataset", "SyntheticSpec", "generate_synthetic", "load_dataset",
    "subsample", "synthetic_corpus", "write_dataset",
    "neighbor_ranking", "pairwise_distances", "rank_matrix",
    "complexity_features", "mnc", "pds",
    "hyperparameter_space", "list_techniques", "project", "register_external",
    "trustworthiness", "continuity", "tnc_f1", "mrre", "mrre_f1",
    "spearman_rho", "pearson_r", "score_projection",
    "fit", "predict", "cross_validate",
    "random_search", "bayes_optimize", "make_threshold_stop",
    "pretrain", "predict_max_accuracy", "adaptive_optimize",
    "conventional_optimize", "compare", "save_model_store", "load_model_store",
    "DradaptError", "ParseError", "ValidationError", "DegenerateInputError",
    "ProjectionError", "ExternalTechniqueError", "UnknownTechniqueError",
    "ObjectiveError", "PretrainError", "WorkflowError",
]
