"""Estimator-style wrappers so scoring and thresholding compose in sklearn
pipelines (``get_params``/``set_params``, ``fit``/``transform``/``predict``).

The underlying metrics are stateless, so ``ConsistencyScorer.fit`` only
builds the embedding backend; the classifier is where calibration happens.
"""
from __future__ import annotations

from typing import Optional, Sequence, Tuple

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted, column_or_1d

from .corpus import Label
from .embed import build_provider
from .evaluate import (
    Orientation,
    balanced_accuracy,
    calibrate_threshold,
    confusion_matrix,
)
from .metrics import METRIC_NAMES, make_scorer

__all__ = ["ConsistencyScorer", "ThresholdConsistencyClassifier"]

_MEASURES = ("precision", "recall", "f1")


def _validate_pairs(X) -> Sequence[Tuple[str, str]]:
    pairs = list(X)
    if not pairs:
        raise ValueError("X must contain at least one (source, summary) pair")
    for i, pair in enumerate(pairs):
        if not (isinstance(pair, (tuple, list)) and len(pair) == 2):
            raise ValueError(
                f"X[{i}] must be a (source, summary) pair, got {type(pair).__name__}"
            )
        source, summary = pair
        if not isinstance(source, str) or not isinstance(summary, str):
            raise ValueError(f"X[{i}] must contain two strings")
    return pairs


class ConsistencyScorer(BaseEstimator, TransformerMixin):
    """Transform (source, summary) pairs into consistency scores.

    Parameters mirror the CLI: ``metric`` picks the scoring family,
    ``measure`` picks which component of the triple is emitted, and the
    ``backend``/``dimension``/``model_id``/``endpoint``/``cache_file``
    group configures the embedding provider (ignored by the n-gram
    metrics).
    """

    def __init__(
        self,
        metric: str = "sbertscore",
        summary_mode: str = "sent",
        source_mode: str = "sent",
        measure: str = "precision",
        backend: str = "hashed",
        dimension: int = 256,
        model_id: Optional[str] = None,
        endpoint: Optional[str] = None,
        cache_file: Optional[str] = None,
        max_tokens: int = 512,
    ):
        self.metric = metric
        self.summary_mode = summary_mode
        self.source_mode = source_mode
        self.measure = measure
        self.backend = backend
        self.dimension = dimension
        self.model_id = model_id
        self.endpoint = endpoint
        self.cache_file = cache_file
        self.max_tokens = max_tokens

    def fit(self, X, y=None):
        _validate_pairs(X)
        if self.metric not in METRIC_NAMES:
            raise ValueError(
                f"metric must be one of {METRIC_NAMES}, got {self.metric!r}"
            )
        if self.measure not in _MEASURES:
            raise ValueError(
                f"measure must be one of {_MEASURES}, got {self.measure!r}"
            )
        if self.metric in ("sbertscore", "bertscore"):
            self.provider_ = build_provider(
                backend=self.backend,
                dimension=self.dimension,
                model_id=self.model_id,
                endpoint=self.endpoint,
                cache_file=self.cache_file,
                max_tokens=self.max_tokens,
            )
        else:
            self.provider_ = None
        self.scorer_ = make_scorer(
            self.metric,
            provider=self.provider_,
            summary_mode=self.summary_mode,
            source_mode=self.source_mode,
        )
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "scorer_")
        pairs = _validate_pairs(X)
        scores = np.empty((len(pairs), 1), dtype=np.float64)
        for i, (source, summary) in enumerate(pairs):
            record = self.scorer_.score(source, summary)
            scores[i, 0] = record.triple.component(self.measure)
        return scores


def _scores_1d(X) -> np.ndarray:
    """Accept (n,), (n, 1), or scalar-like score input; reject wider arrays."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    return column_or_1d(arr)


class ThresholdConsistencyClassifier(BaseEstimator, ClassifierMixin):
    """Calibrated threshold rule over one-dimensional consistency scores.

    ``fit`` picks the threshold maximizing balanced accuracy on the
    training scores; ``predict`` applies the oriented rule. ``score``
    deliberately reports balanced accuracy rather than plain accuracy,
    matching how these thresholds are selected.
    """

    def __init__(self, orientation: str = "above"):
        self.orientation = orientation

    def fit(self, X, y):
        scores = _scores_1d(X)
        labels = [Label(v) for v in column_or_1d(np.asarray(y, dtype=object))]
        if len(labels) != len(scores):
            raise ValueError(
                f"X and y disagree on length: {len(scores)} != {len(labels)}"
            )
        keyed_scores = {str(i): float(s) for i, s in enumerate(scores)}
        keyed_labels = {str(i): lab for i, lab in enumerate(labels)}
        result = calibrate_threshold(
            keyed_scores, keyed_labels, Orientation(self.orientation)
        )
        self.threshold_ = result.threshold
        self.orientation_ = result.orientation
        self.validation_balanced_accuracy_ = result.balanced_accuracy
        self.classes_ = np.asarray([Label.CONSISTENT.value, Label.INCONSISTENT.value])
        return self

    def decision_function(self, X) -> np.ndarray:
        """Signed distance oriented so larger means more likely inconsistent."""
        check_is_fitted(self, "threshold_")
        scores = _scores_1d(X)
        if self.orientation_ is Orientation.ABOVE:
            return self.threshold_ - scores
        return scores - self.threshold_

    def predict(self, X) -> np.ndarray:
        margins = self.decision_function(X)
        return np.where(
            margins <= 0, Label.CONSISTENT.value, Label.INCONSISTENT.value
        )

    def score(self, X, y, sample_weight=None) -> float:
        """Balanced accuracy of the thresholded predictions (not accuracy)."""
        predicted = self.predict(X)
        labels = {
            str(i): Label(v)
            for i, v in enumerate(column_or_1d(np.asarray(y, dtype=object)))
        }
        predictions = {str(i): Label(v) for i, v in enumerate(predicted)}
        return balanced_accuracy(confusion_matrix(labels, predictions))
