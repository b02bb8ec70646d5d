"""Factual-consistency scoring for abstractive summaries.

Sentence-level embedding similarity is the headline metric, with
token-level similarity and n-gram overlap as baselines, plus the
calibration/evaluation machinery to turn scores into a benchmarked
consistency classifier.
"""

from .corpus import (
    Attribute,
    BenchmarkRecord,
    CorpusError,
    ErrorType,
    ExternalScoreSet,
    Label,
    Locus,
    Origin,
    Split,
    load_benchmark,
    load_external_scores,
    save_benchmark,
)
from .embed import (
    EmbeddingCache,
    EmbeddingError,
    EmbeddingProvider,
    EmbeddingVector,
    HashedProvider,
    HttpProvider,
    InMemoryCache,
    VectorFileProvider,
    build_provider,
    hashed_embedding,
    mean_embedding,
)
from .estimators import ConsistencyScorer, ThresholdConsistencyClassifier
from .evaluate import (
    CONFUSION_CONVENTION,
    BinaryPredictionSet,
    BootstrapResult,
    CalibrationResult,
    ConfusionMatrix,
    ErrorTypeRecallReport,
    EvalError,
    Orientation,
    and_dominance_holds,
    balanced_accuracy,
    bootstrap_significance,
    calibrate_threshold,
    cohen_kappa,
    combine,
    confusion_matrix,
    error_type_recall,
    load_predictions,
    predict_labels,
    roc_auc,
    write_predictions,
)
from .metrics import (
    METRIC_NAMES,
    Granularity,
    MetricTriple,
    RecordScore,
    cosine_similarity,
    bertscore,
    make_scorer,
    rouge_l,
    rouge_n,
    sbert_precision,
    sbert_recall,
    sbert_score,
    similarity_matrix,
)
from .segment import SentenceSet, TokenSequence, split_sentences, tokenize, truncate_tokens
from .synth import PERTURBATIONS, SynthConfig, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "Attribute",
    "BenchmarkRecord",
    "BinaryPredictionSet",
    "BootstrapResult",
    "CONFUSION_CONVENTION",
    "CalibrationResult",
    "ConfusionMatrix",
    "ConsistencyScorer",
    "CorpusError",
    "EmbeddingCache",
    "EmbeddingError",
    "EmbeddingProvider",
    "EmbeddingVector",
    "ErrorType",
    "ErrorTypeRecallReport",
    "EvalError",
    "ExternalScoreSet",
    "Granularity",
    "HashedProvider",
    "HttpProvider",
    "InMemoryCache",
    "Label",
    "Locus",
    "METRIC_NAMES",
    "MetricTriple",
    "Orientation",
    "Origin",
    "PERTURBATIONS",
    "RecordScore",
    "SentenceSet",
    "Split",
    "SynthConfig",
    "ThresholdConsistencyClassifier",
    "TokenSequence",
    "VectorFileProvider",
    "and_dominance_holds",
    "balanced_accuracy",
    "bertscore",
    "bootstrap_significance",
    "build_provider",
    "calibrate_threshold",
    "cohen_kappa",
    "combine",
    "confusion_matrix",
    "cosine_similarity",
    "error_type_recall",
    "generate_synthetic",
    "hashed_embedding",
    "load_benchmark",
    "load_external_scores",
    "load_predictions",
    "make_scorer",
    "mean_embedding",
    "predict_labels",
    "roc_auc",
    "rouge_l",
    "rouge_n",
    "save_benchmark",
    "sbert_precision",
    "sbert_recall",
    "sbert_score",
    "similarity_matrix",
    "split_sentences",
    "tokenize",
    "truncate_tokens",
    "write_predictions",
]
