"""Consistency metric kernels.

The sentence-similarity score embeds summary and source units, builds the
pairwise cosine matrix, and reads precision as the mean over summary units
of the best source match (recall symmetrically over source units). The
token-level variant does the same over token embeddings. ROUGE variants
give the n-gram and longest-common-subsequence baselines.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .embed import EmbeddingProvider, EmbeddingVector, mean_embedding
from .segment import TokenSequence, split_sentences, tokenize

__all__ = [
    "Granularity",
    "MetricTriple",
    "RecordScore",
    "RougeScorer",
    "SentenceSimilarityScorer",
    "SimilarityMatrix",
    "TokenSimilarityScorer",
    "METRIC_NAMES",
    "bertscore",
    "cosine_similarity",
    "make_scorer",
    "rouge_l",
    "rouge_n",
    "sbert_precision",
    "sbert_recall",
    "sbert_score",
    "similarity_matrix",
]

METRIC_NAMES = ("sbertscore", "bertscore", "rouge1", "rouge2", "rougeL")


class Granularity(str, Enum):
    SENT = "sent"
    DOC = "doc"
    MEAN = "mean"


@dataclass(frozen=True)
class MetricTriple:
    """Precision/recall/F1, with F1 = 2pr/(p+r) when p+r > 0, else 0."""

    precision: float
    recall: float
    f1: float
    degenerate: bool = False

    @staticmethod
    def from_pr(precision: float, recall: float, degenerate: bool = False) -> "MetricTriple":
        total = precision + recall
        f1 = (2.0 * precision * recall / total) if total > 0 else 0.0
        return MetricTriple(
            precision=precision, recall=recall, f1=f1, degenerate=degenerate
        )

    @staticmethod
    def zero(degenerate: bool = False) -> "MetricTriple":
        return MetricTriple(0.0, 0.0, 0.0, degenerate=degenerate)

    def component(self, measure: str) -> float:
        if measure not in ("precision", "recall", "f1"):
            raise ValueError(f"unknown measure {measure!r}")
        return getattr(self, measure)


@dataclass(frozen=True)
class RecordScore:
    """A metric triple plus truncation flags for one (source, summary) pair."""

    triple: MetricTriple
    truncated_source: bool = False
    truncated_summary: bool = False


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity in [-1, 1].

    Any comparison against a zero vector is 0 by convention, and vectors
    with bit-identical values compare as exactly 1.0 (this anchors the copy
    identity of the sentence score).
    """
    if a.dimension != b.dimension:
        raise ValueError(
            f"dimension mismatch: {a.dimension} vs {b.dimension}"
        )
    if a.norm == 0.0 or b.norm == 0.0:
        return 0.0
    if np.array_equal(a.values, b.values):
        return 1.0
    dot = float(
        np.dot(a.values.astype(np.float64), b.values.astype(np.float64))
    )
    return min(1.0, max(-1.0, dot / (a.norm * b.norm)))


class SimilarityMatrix:
    """Pairwise cosines; rows are summary units, columns are source units."""

    def __init__(self, cells: np.ndarray) -> None:
        cells = np.asarray(cells, dtype=np.float64)
        if cells.ndim != 2 or cells.shape[0] == 0 or cells.shape[1] == 0:
            raise ValueError("similarity matrix must be 2-D and non-empty")
        self.cells = cells

    @property
    def shape(self) -> Tuple[int, int]:
        return self.cells.shape


def similarity_matrix(
    summary_units: Sequence[EmbeddingVector],
    source_units: Sequence[EmbeddingVector],
) -> SimilarityMatrix:
    if not summary_units:
        raise ValueError("summary side has no units")
    if not source_units:
        raise ValueError("source side has no units")
    cells = np.empty((len(summary_units), len(source_units)), dtype=np.float64)
    for i, a in enumerate(summary_units):
        for j, b in enumerate(source_units):
            cells[i, j] = cosine_similarity(a, b)
    return SimilarityMatrix(cells)


def sbert_precision(matrix: SimilarityMatrix) -> float:
    """Mean over summary units of the best source-unit match."""
    return float(np.mean(np.max(matrix.cells, axis=1)))


def sbert_recall(matrix: SimilarityMatrix) -> float:
    """Mean over source units of the best summary-unit match."""
    return float(np.mean(np.max(matrix.cells, axis=0)))


def _units(
    text: str, mode: Granularity, provider: EmbeddingProvider
) -> Tuple[List[EmbeddingVector], bool]:
    if mode is Granularity.DOC:
        vectors, flags = provider.embed_texts_flagged([text])
        return vectors, flags[0]
    sentences = split_sentences(text).sentences
    vectors, flags = provider.embed_texts_flagged(list(sentences))
    if mode is Granularity.MEAN:
        return [mean_embedding(vectors)], any(flags)
    return vectors, any(flags)


def sbert_score(
    source: str,
    summary: str,
    provider: EmbeddingProvider,
    *,
    summary_mode: Granularity = Granularity.SENT,
    source_mode: Granularity = Granularity.SENT,
) -> RecordScore:
    """Sentence-embedding consistency score at the requested granularities."""
    summary_units, summary_truncated = _units(summary, Granularity(summary_mode), provider)
    source_units, source_truncated = _units(source, Granularity(source_mode), provider)
    matrix = similarity_matrix(summary_units, source_units)
    triple = MetricTriple.from_pr(sbert_precision(matrix), sbert_recall(matrix))
    return RecordScore(
        triple=triple,
        truncated_source=source_truncated,
        truncated_summary=summary_truncated,
    )


def bertscore(
    source: str, summary: str, provider: EmbeddingProvider
) -> RecordScore:
    """Greedy token-matching score over contextual (or hashed) token vectors.

    No idf weighting and no baseline rescaling; plain maxima means.
    """
    summary_tokens = provider.embed_tokens(summary)
    source_tokens = provider.embed_tokens(source)
    matrix = similarity_matrix(list(summary_tokens.vectors), list(source_tokens.vectors))
    triple = MetricTriple.from_pr(sbert_precision(matrix), sbert_recall(matrix))
    return RecordScore(
        triple=triple,
        truncated_source=source_tokens.truncated,
        truncated_summary=summary_tokens.truncated,
    )


def _as_tokens(seq: "TokenSequence | Sequence[str]") -> Tuple[str, ...]:
    return tuple(seq.tokens if isinstance(seq, TokenSequence) else seq)


def rouge_n(
    reference: "TokenSequence | Sequence[str]",
    candidate: "TokenSequence | Sequence[str]",
    n: int,
) -> MetricTriple:
    """Clipped n-gram overlap; candidate precision against the reference.

    A side shorter than ``n`` cannot form any n-gram: the result is the zero
    triple with ``degenerate`` set.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    ref = _as_tokens(reference)
    cand = _as_tokens(candidate)
    ref_grams = Counter(tuple(ref[i : i + n]) for i in range(len(ref) - n + 1))
    cand_grams = Counter(tuple(cand[i : i + n]) for i in range(len(cand) - n + 1))
    if not ref_grams or not cand_grams:
        return MetricTriple.zero(degenerate=True)
    overlap = sum(min(count, ref_grams[gram]) for gram, count in cand_grams.items())
    precision = overlap / sum(cand_grams.values())
    recall = overlap / sum(ref_grams.values())
    return MetricTriple.from_pr(precision, recall)


def _lcs_length(a: Tuple[str, ...], b: Tuple[str, ...]) -> int:
    # Rolling single-row dynamic program.
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        current = [0] * (len(b) + 1)
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                current[j] = previous[j - 1] + 1
            else:
                current[j] = max(previous[j], current[j - 1])
        previous = current
    return previous[len(b)]


def rouge_l(
    reference: "TokenSequence | Sequence[str]",
    candidate: "TokenSequence | Sequence[str]",
) -> MetricTriple:
    """Longest-common-subsequence overlap between token sequences."""
    ref = _as_tokens(reference)
    cand = _as_tokens(candidate)
    if not ref or not cand:
        raise ValueError("rouge_l needs non-empty token sequences on both sides")
    lcs = _lcs_length(ref, cand)
    return MetricTriple.from_pr(lcs / len(cand), lcs / len(ref))


class SentenceSimilarityScorer:
    """Scores records with the sentence-embedding metric."""

    name = "sbertscore"

    def __init__(
        self,
        provider: EmbeddingProvider,
        summary_mode: Granularity = Granularity.SENT,
        source_mode: Granularity = Granularity.SENT,
    ) -> None:
        self.provider = provider
        self.summary_mode = Granularity(summary_mode)
        self.source_mode = Granularity(source_mode)

    def score(self, source: str, summary: str) -> RecordScore:
        return sbert_score(
            source,
            summary,
            self.provider,
            summary_mode=self.summary_mode,
            source_mode=self.source_mode,
        )


class TokenSimilarityScorer:
    """Scores records with the greedy token-matching metric."""

    name = "bertscore"

    def __init__(self, provider: EmbeddingProvider) -> None:
        self.provider = provider

    def score(self, source: str, summary: str) -> RecordScore:
        return bertscore(source, summary, self.provider)


class RougeScorer:
    """Scores records with an n-gram or LCS overlap baseline."""

    def __init__(self, variant: str) -> None:
        if variant not in ("rouge1", "rouge2", "rougeL"):
            raise ValueError(f"unknown rouge variant {variant!r}")
        self.name = variant

    def score(self, source: str, summary: str) -> RecordScore:
        reference = tokenize(source)
        candidate = tokenize(summary)
        if self.name == "rougeL":
            if not len(reference) or not len(candidate):
                triple = MetricTriple.zero(degenerate=True)
            else:
                triple = rouge_l(reference, candidate)
        else:
            triple = rouge_n(reference, candidate, n=1 if self.name == "rouge1" else 2)
        return RecordScore(triple=triple)


def make_scorer(
    metric: str,
    provider: Optional[EmbeddingProvider] = None,
    summary_mode: Granularity = Granularity.SENT,
    source_mode: Granularity = Granularity.SENT,
):
    """Build the scorer for a metric name; embedding metrics need a provider."""
    if metric == "sbertscore":
        if provider is None:
            raise ValueError("sbertscore needs an embedding provider")
        return SentenceSimilarityScorer(
            provider, summary_mode=summary_mode, source_mode=source_mode
        )
    if metric == "bertscore":
        if provider is None:
            raise ValueError("bertscore needs an embedding provider")
        return TokenSimilarityScorer(provider)
    if metric in ("rouge1", "rouge2", "rougeL"):
        return RougeScorer(metric)
    raise ValueError(f"unknown metric {metric!r}")
