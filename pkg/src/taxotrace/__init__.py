"""taxotrace: zero-shot hierarchical multi-label classification toolkit."""

from .classifier import Artifact, Prediction, RankedLabel, classify, classify_dataset
from .embedding import EmbeddingProviderConfig, cosine_similarity, create_provider
from .metrics import BetaParams, EvalReport, compute_beta, evaluate, f_beta, label_distance
from .taxonomy import Taxonomy, TaxonomyNode, TaxonomyStats, load_taxonomy, parse_taxonomy

__version__ = "0.1.0"

__all__ = [
    "Artifact",
    "BetaParams",
    "EmbeddingProviderConfig",
    "EvalReport",
    "Prediction",
    "RankedLabel",
    "Taxonomy",
    "TaxonomyNode",
    "TaxonomyStats",
    "classify",
    "classify_dataset",
    "compute_beta",
    "cosine_similarity",
    "create_provider",
    "evaluate",
    "f_beta",
    "label_distance",
    "load_taxonomy",
    "parse_taxonomy",
    "__version__",
]
