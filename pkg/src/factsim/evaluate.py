"""Evaluation protocol: calibration, classification metrics, agreement.

The positive class is fixed: positive means *inconsistent*. Every confusion
count below follows the convention table ``CONFUSION_CONVENTION``, which is
also embedded in emitted reports because published variants of this
protocol disagree on polarity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .corpus import BenchmarkRecord, ErrorType, Label, Split

__all__ = [
    "BinaryPredictionSet",
    "BootstrapResult",
    "CalibrationResult",
    "CONFUSION_CONVENTION",
    "ConfusionMatrix",
    "ErrorTypeRecallReport",
    "EvalError",
    "Orientation",
    "and_dominance_holds",
    "balanced_accuracy",
    "bootstrap_significance",
    "calibrate_threshold",
    "cohen_kappa",
    "combine",
    "confusion_matrix",
    "error_type_recall",
    "load_predictions",
    "predict_labels",
    "roc_auc",
    "write_predictions",
]


class EvalError(ValueError):
    """Raised for invalid evaluation inputs."""


CONFUSION_CONVENTION = {
    "positive_class": "inconsistent",
    "tp": "predicted inconsistent, labeled inconsistent",
    "fp": "predicted inconsistent, labeled consistent",
    "tn": "predicted consistent, labeled consistent",
    "fn": "predicted consistent, labeled inconsistent (a missed error)",
}


class Orientation(str, Enum):
    """Which side of the threshold counts as consistent.

    ABOVE: scores at or above the threshold predict consistent.
    BELOW: scores at or below the threshold predict consistent.
    """

    ABOVE = "above"
    BELOW = "below"


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def rates(self) -> Dict[str, float]:
        total = self.total
        if total == 0:
            raise EvalError("confusion matrix is empty")
        return {
            "tp": self.tp / total,
            "tn": self.tn / total,
            "fp": self.fp / total,
            "fn": self.fn / total,
        }

    def as_dict(self) -> Dict[str, object]:
        return {
            "counts": {"tp": self.tp, "tn": self.tn, "fp": self.fp, "fn": self.fn},
            "rates": self.rates(),
        }


def _check_same_ids(
    left: Mapping[str, object], right: Mapping[str, object], what: str
) -> None:
    missing = sorted(set(left) - set(right))
    extra = sorted(set(right) - set(left))
    if missing or extra:
        parts = []
        if missing:
            shown = ", ".join(repr(i) for i in missing[:10])
            parts.append(f"{len(missing)} ids missing from {what} ({shown})")
        if extra:
            shown = ", ".join(repr(i) for i in extra[:10])
            parts.append(f"{len(extra)} unexpected ids in {what} ({shown})")
        raise EvalError("; ".join(parts))


@dataclass(frozen=True)
class BinaryPredictionSet:
    """Binary consistency predictions keyed by record id."""

    metric_name: str
    predictions: Mapping[str, Label]
    threshold: Optional[float] = None
    orientation: Optional[Orientation] = None

    @property
    def provenance(self) -> str:
        if self.threshold is None:
            return self.metric_name
        return f"{self.metric_name}@{_format_threshold(self.threshold)}"


def _format_threshold(value: float) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def _threshold_to_json(value: Optional[float]):
    if value is None:
        return None
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def _threshold_from_json(value) -> Optional[float]:
    if value is None:
        return None
    if value == "inf":
        return math.inf
    if value == "-inf":
        return -math.inf
    return float(value)


def predict_labels(
    scores: Mapping[str, float], threshold: float, orientation: Orientation
) -> Dict[str, Label]:
    orientation = Orientation(orientation)
    out: Dict[str, Label] = {}
    for record_id, score in scores.items():
        if orientation is Orientation.ABOVE:
            consistent = score >= threshold
        else:
            consistent = score <= threshold
        out[record_id] = Label.CONSISTENT if consistent else Label.INCONSISTENT
    return out


def confusion_matrix(
    labels: Mapping[str, Label],
    predictions: Union[Mapping[str, Label], BinaryPredictionSet],
) -> ConfusionMatrix:
    """Count outcomes; label and prediction id sets must match exactly."""
    if isinstance(predictions, BinaryPredictionSet):
        predictions = predictions.predictions
    _check_same_ids(labels, predictions, "predictions")
    tp = tn = fp = fn = 0
    for record_id, label in labels.items():
        predicted = predictions[record_id]
        if predicted is Label.INCONSISTENT:
            if label is Label.INCONSISTENT:
                tp += 1
            else:
                fp += 1
        else:
            if label is Label.CONSISTENT:
                tn += 1
            else:
                fn += 1
    return ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn)


def balanced_accuracy(cm: ConfusionMatrix) -> float:
    """Mean of the two per-class recalls; needs both classes present."""
    positives = cm.tp + cm.fn
    negatives = cm.tn + cm.fp
    if positives == 0 or negatives == 0:
        raise EvalError(
            "balanced accuracy needs both classes present "
            f"(positives={positives}, negatives={negatives})"
        )
    return 0.5 * (cm.tp / positives + cm.tn / negatives)


@dataclass(frozen=True)
class CalibrationResult:
    threshold: float
    orientation: Orientation
    balanced_accuracy: float
    n_scores: int

    def to_dict(self) -> Dict[str, object]:
        return {
            "threshold": _threshold_to_json(self.threshold),
            "orientation": self.orientation.value,
            "balanced_accuracy": self.balanced_accuracy,
            "n_scores": self.n_scores,
        }

    @staticmethod
    def from_dict(data: Mapping) -> "CalibrationResult":
        return CalibrationResult(
            threshold=_threshold_from_json(data["threshold"]),
            orientation=Orientation(data["orientation"]),
            balanced_accuracy=float(data["balanced_accuracy"]),
            n_scores=int(data.get("n_scores", 0)),
        )


def _sweep_thresholds(
    scores: np.ndarray, inconsistent: np.ndarray, orientation: Orientation
) -> Tuple[np.ndarray, np.ndarray]:
    """All candidate thresholds (with -inf/inf sentinels) and their balanced
    accuracies, in ascending threshold order."""
    values, inverse = np.unique(scores, return_inverse=True)
    incons_per_value = np.bincount(
        inverse, weights=inconsistent.astype(np.float64), minlength=len(values)
    )
    cons_per_value = np.bincount(
        inverse, weights=(~inconsistent).astype(np.float64), minlength=len(values)
    )
    cum_incons = np.concatenate([[0.0], np.cumsum(incons_per_value)])
    cum_cons = np.concatenate([[0.0], np.cumsum(cons_per_value)])
    total_incons = cum_incons[-1]
    total_cons = cum_cons[-1]

    thresholds = np.concatenate(
        [[-np.inf], (values[:-1] + values[1:]) / 2.0, [np.inf]]
    )
    # For the k-th candidate, scores strictly below it live in value blocks
    # 0..k-1, so the cumulative sums at k give the below-threshold class
    # counts directly.
    below_incons = cum_incons
    below_cons = cum_cons
    if orientation is Orientation.ABOVE:
        tp = below_incons
        tn = total_cons - below_cons
    else:
        tp = total_incons - below_incons
        tn = below_cons
    ba = 0.5 * (tp / total_incons + tn / total_cons)
    return thresholds, ba


def calibrate_threshold(
    scores: Mapping[str, float],
    labels: Mapping[str, Label],
    orientation: Orientation = Orientation.ABOVE,
) -> CalibrationResult:
    """Pick the threshold maximizing balanced accuracy.

    Candidates are the midpoints between consecutive distinct scores plus
    -inf/inf sentinels; ties prefer the smallest threshold. Calibrate on
    validation data only.
    """
    orientation = Orientation(orientation)
    _check_same_ids(scores, labels, "labels")
    if not scores:
        raise EvalError("cannot calibrate on an empty score set")
    ids = list(scores)
    score_arr = np.asarray([scores[i] for i in ids], dtype=np.float64)
    incons = np.asarray([labels[i] is Label.INCONSISTENT for i in ids], dtype=bool)
    if not incons.any() or incons.all():
        raise EvalError("calibration needs both classes present")
    thresholds, ba = _sweep_thresholds(score_arr, incons, orientation)
    best = int(np.argmax(ba))
    return CalibrationResult(
        threshold=float(thresholds[best]),
        orientation=orientation,
        balanced_accuracy=float(ba[best]),
        n_scores=len(ids),
    )


def roc_auc(scores: Mapping[str, float], labels: Mapping[str, Label]) -> float:
    """Probability a random consistent record outscores a random
    inconsistent one, counting ties as one half (midrank formulation)."""
    _check_same_ids(scores, labels, "labels")
    ids = list(scores)
    score_arr = np.asarray([scores[i] for i in ids], dtype=np.float64)
    consistent = np.asarray([labels[i] is Label.CONSISTENT for i in ids], dtype=bool)
    n_cons = int(consistent.sum())
    n_incons = len(ids) - n_cons
    if n_cons == 0 or n_incons == 0:
        raise EvalError("roc_auc needs both classes present")
    _, inverse, counts = np.unique(score_arr, return_inverse=True, return_counts=True)
    cum = np.concatenate([[0.0], np.cumsum(counts)])
    midranks = cum[:-1] + (counts + 1) / 2.0
    ranks = midranks[inverse]
    rank_sum = float(ranks[consistent].sum())
    return (rank_sum - n_cons * (n_cons + 1) / 2.0) / (n_cons * n_incons)


def cohen_kappa(a: BinaryPredictionSet, b: BinaryPredictionSet) -> float:
    """Chance-corrected agreement between two binary prediction sets."""
    _check_same_ids(a.predictions, b.predictions, f"{b.metric_name} predictions")
    n = len(a.predictions)
    if n == 0:
        raise EvalError("cannot compute agreement on empty prediction sets")
    agree = 0
    a_cons = 0
    b_cons = 0
    for record_id, label_a in a.predictions.items():
        label_b = b.predictions[record_id]
        if label_a is label_b:
            agree += 1
        if label_a is Label.CONSISTENT:
            a_cons += 1
        if label_b is Label.CONSISTENT:
            b_cons += 1
    p_observed = agree / n
    p_expected = (a_cons * b_cons + (n - a_cons) * (n - b_cons)) / (n * n)
    if p_expected == 1.0:
        return 1.0 if p_observed == 1.0 else 0.0
    return (p_observed - p_expected) / (1.0 - p_expected)


def combine(
    a: BinaryPredictionSet, b: BinaryPredictionSet, op: str
) -> BinaryPredictionSet:
    """Logical combination: AND is consistent only when both agree it is,
    OR when either says so. AND therefore flags the union of the two
    flagged-inconsistent sets."""
    if op not in ("and", "or"):
        raise EvalError(f"op must be 'and' or 'or', got {op!r}")
    _check_same_ids(a.predictions, b.predictions, f"{b.metric_name} predictions")
    combined: Dict[str, Label] = {}
    for record_id, label_a in a.predictions.items():
        label_b = b.predictions[record_id]
        both = label_a is Label.CONSISTENT and label_b is Label.CONSISTENT
        either = label_a is Label.CONSISTENT or label_b is Label.CONSISTENT
        consistent = both if op == "and" else either
        combined[record_id] = Label.CONSISTENT if consistent else Label.INCONSISTENT
    return BinaryPredictionSet(
        metric_name=f"{op}({a.metric_name},{b.metric_name})",
        predictions=combined,
    )


def and_dominance_holds(combined, a, b) -> bool:
    """Union-consistency of an AND combination's confusion structure.

    Works on anything exposing tp/tn/fp/fn (counts or rates): the AND
    combination flags a superset, so its tp and fp can only grow and its tn
    and fn can only shrink relative to each base metric.
    """
    return (
        combined.tp >= max(a.tp, b.tp)
        and combined.fp >= max(a.fp, b.fp)
        and combined.tn <= min(a.tn, b.tn)
        and combined.fn <= min(a.fn, b.fn)
    )


@dataclass(frozen=True)
class ErrorTypeRecallReport:
    """Per-error-type detection recall plus precision on clean records.

    ``recalls`` maps ErrorType (and the string "correct") to a fraction;
    categories with an empty denominator are listed in ``omitted``.
    """

    recalls: Mapping[object, float]
    omitted: Tuple[str, ...] = ()

    def as_dict(self) -> Dict[str, float]:
        out = {}
        for key, value in self.recalls.items():
            name = key.key if isinstance(key, ErrorType) else str(key)
            out[name] = value
        return dict(sorted(out.items()))


def error_type_recall(
    records: Sequence[BenchmarkRecord],
    predictions: Union[Mapping[str, Label], BinaryPredictionSet],
) -> ErrorTypeRecallReport:
    """How often each error category is flagged, and how often clean records
    are passed through ("correct")."""
    if isinstance(predictions, BinaryPredictionSet):
        predictions = predictions.predictions
    missing = sorted({r.id for r in records} - set(predictions))
    if missing:
        shown = ", ".join(repr(i) for i in missing[:10])
        raise EvalError(f"{len(missing)} records have no prediction ({shown})")

    tallies: Dict[object, List[int]] = {}

    def bump(key, hit: bool) -> None:
        entry = tallies.setdefault(key, [0, 0])
        entry[0] += 1 if hit else 0
        entry[1] += 1

    for record in records:
        predicted = predictions[record.id]
        if record.label is Label.CONSISTENT:
            bump("correct", predicted is Label.CONSISTENT)
        else:
            for error_type in record.error_types:
                bump(error_type, predicted is Label.INCONSISTENT)

    recalls: Dict[object, float] = {}
    for key, (hits, total) in tallies.items():
        recalls[key] = hits / total
    omitted = []
    if not any(r.label is Label.CONSISTENT for r in records):
        omitted.append("correct")
    return ErrorTypeRecallReport(recalls=recalls, omitted=tuple(omitted))


@dataclass(frozen=True)
class BootstrapResult:
    p_value: float
    resamples: int
    seed: int


def _array_best_ba(
    scores: np.ndarray, incons: np.ndarray, orientation: Orientation
) -> Tuple[float, float]:
    thresholds, ba = _sweep_thresholds(scores, incons, orientation)
    best = int(np.argmax(ba))
    return float(thresholds[best]), float(ba[best])


def _array_ba(
    scores: np.ndarray,
    incons: np.ndarray,
    threshold: float,
    orientation: Orientation,
) -> float:
    if orientation is Orientation.ABOVE:
        pred_cons = scores >= threshold
    else:
        pred_cons = scores <= threshold
    tp = int((~pred_cons & incons).sum())
    fn = int((pred_cons & incons).sum())
    tn = int((pred_cons & ~incons).sum())
    fp = int((~pred_cons & ~incons).sum())
    return 0.5 * (tp / (tp + fn) + tn / (tn + fp))


def bootstrap_significance(
    scores_a: Mapping[str, float],
    scores_b: Mapping[str, float],
    labels: Mapping[str, Label],
    resamples: int = 10000,
    seed: int = 0,
    *,
    splits: Optional[Mapping[str, Split]] = None,
    orientation_a: Orientation = Orientation.ABOVE,
    orientation_b: Orientation = Orientation.ABOVE,
) -> BootstrapResult:
    """Paired bootstrap comparison of two metrics' balanced accuracies.

    Each resample draws record ids with replacement, recalibrates both
    metrics on the resampled validation part, and evaluates on the
    resampled test part (or calibrates and evaluates on the whole resample
    when no split map is given). The p-value is the fraction of resamples
    where metric A does not beat metric B. One-class resamples are redrawn,
    with a bounded retry.
    """
    if resamples < 1000:
        raise EvalError(f"resamples must be >= 1000, got {resamples}")
    _check_same_ids(scores_a, labels, "labels")
    _check_same_ids(scores_b, labels, "labels")
    ids = sorted(labels)
    if splits is not None:
        _check_same_ids(labels, splits, "splits")
        val_ids = [i for i in ids if splits[i] is Split.VALIDATION]
        test_ids = [i for i in ids if splits[i] is Split.TEST]
        if not val_ids or not test_ids:
            raise EvalError("split bootstrap needs non-empty validation and test")
        pools = (val_ids, test_ids)
    else:
        pools = (ids,)

    pool_arrays = []
    for pool in pools:
        pool_arrays.append(
            (
                np.asarray([scores_a[i] for i in pool], dtype=np.float64),
                np.asarray([scores_b[i] for i in pool], dtype=np.float64),
                np.asarray([labels[i] is Label.INCONSISTENT for i in pool], dtype=bool),
            )
        )

    not_better = 0
    max_retries = 1000
    for r in range(resamples):
        rng = np.random.default_rng([seed, r])
        for attempt in range(max_retries + 1):
            draws = [
                rng.integers(0, len(arrs[2]), size=len(arrs[2]))
                for arrs in pool_arrays
            ]
            ok = all(
                0 < arrs[2][draw].sum() < len(draw)
                for arrs, draw in zip(pool_arrays, draws)
            )
            if ok:
                break
        else:
            raise EvalError(
                f"resample {r}: could not draw both classes in "
                f"{max_retries} retries"
            )
        if splits is not None:
            (val_a, val_b, val_y), (test_a, test_b, test_y) = pool_arrays
            val_draw, test_draw = draws
            thr_a, _ = _array_best_ba(val_a[val_draw], val_y[val_draw], orientation_a)
            thr_b, _ = _array_best_ba(val_b[val_draw], val_y[val_draw], orientation_b)
            ba_a = _array_ba(test_a[test_draw], test_y[test_draw], thr_a, orientation_a)
            ba_b = _array_ba(test_b[test_draw], test_y[test_draw], thr_b, orientation_b)
        else:
            (all_a, all_b, all_y) = pool_arrays[0]
            draw = draws[0]
            _, ba_a = _array_best_ba(all_a[draw], all_y[draw], orientation_a)
            _, ba_b = _array_best_ba(all_b[draw], all_y[draw], orientation_b)
        if ba_a <= ba_b:
            not_better += 1
    return BootstrapResult(
        p_value=not_better / resamples, resamples=resamples, seed=seed
    )


def write_predictions(pred_set: BinaryPredictionSet, path) -> None:
    """Persist predictions as JSONL: a header line, then one id/label line
    per record (sorted by id)."""
    import json

    header = {
        "metric_name": pred_set.metric_name,
        "threshold": _threshold_to_json(pred_set.threshold),
        "orientation": pred_set.orientation.value if pred_set.orientation else None,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(header) + "\n")
        for record_id in sorted(pred_set.predictions):
            line = {"id": record_id, "label": pred_set.predictions[record_id].value}
            fh.write(json.dumps(line) + "\n")


def load_predictions(path) -> BinaryPredictionSet:
    import json

    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh if ln.strip()]
    if not lines:
        raise EvalError(f"{path}: empty prediction file")
    header = json.loads(lines[0])
    if "metric_name" not in header:
        raise EvalError(f"{path}: prediction header is missing 'metric_name'")
    predictions: Dict[str, Label] = {}
    for line_no, line in enumerate(lines[1:], start=2):
        data = json.loads(line)
        if "id" not in data or "label" not in data:
            raise EvalError(f"{path}: line {line_no} needs 'id' and 'label'")
        try:
            predictions[data["id"]] = Label(data["label"])
        except ValueError:
            raise EvalError(
                f"{path}: line {line_no} has invalid label {data['label']!r}"
            ) from None
    orientation = header.get("orientation")
    return BinaryPredictionSet(
        metric_name=str(header["metric_name"]),
        predictions=predictions,
        threshold=_threshold_from_json(header.get("threshold")),
        orientation=Orientation(orientation) if orientation else None,
    )
