"""Command-line interface.

Subcommands cover the full workflow: ``synth`` builds a labeled corpus,
``score`` runs a metric over it, ``calibrate`` picks thresholds on the
validation split, ``evaluate`` reports test-split quality, ``agree`` and
``combine`` compare metrics, and ``bench`` sanity-checks embedding-call
costs. All file outputs are deterministic for a fixed input and seed;
wall-clock timings go to stdout only.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .corpus import (
    BenchmarkRecord,
    CorpusError,
    Label,
    Split,
    load_benchmark,
    load_external_scores,
    save_benchmark,
)
from .embed import EmbeddingError, InMemoryCache, build_provider, normalize_text
from .evaluate import (
    CONFUSION_CONVENTION,
    BinaryPredictionSet,
    EvalError,
    Orientation,
    and_dominance_holds,
    balanced_accuracy,
    calibrate_threshold,
    cohen_kappa,
    combine,
    confusion_matrix,
    error_type_recall,
    load_predictions,
    predict_labels,
    roc_auc,
    write_predictions,
    _threshold_from_json,
    _threshold_to_json,
)
from .metrics import METRIC_NAMES, make_scorer
from .segment import split_sentences
from .synth import PERTURBATIONS, SynthConfig, generate_synthetic

__all__ = ["main"]

_GRANULARITIES = tuple(
    f"{src}:{summ}"
    for src in ("sent", "doc", "mean")
    for summ in ("sent", "doc", "mean")
)


class CliError(Exception):
    """User-facing failure; message printed to stderr, exit code 1."""


def _fail(message: str) -> "CliError":
    return CliError(message)


# ---------------------------------------------------------------------------
# config handling


def _load_config(path: str) -> Dict[str, object]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise _fail(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _fail(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise _fail(f"config {path} must hold a JSON object")
    return {str(key).replace("-", "_"): value for key, value in data.items()}


def _merge_config(args: argparse.Namespace, defaults: Mapping[str, object]) -> None:
    """Fill unset options from --config, then from hard defaults.

    Explicit command-line flags always win (they are the non-None values
    after parsing); config keys use the long option names in either
    kebab-case or snake_case.
    """
    config: Dict[str, object] = {}
    if getattr(args, "config", None):
        config = _load_config(args.config)
    for name, value in config.items():
        if hasattr(args, name) and getattr(args, name) is None:
            setattr(args, name, value)
    for name, value in defaults.items():
        if getattr(args, name, None) is None:
            setattr(args, name, value)


def _write_text(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _dump_json(payload: object) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# score files


def _load_native_scores(path: str) -> Tuple[str, Dict[str, Dict[str, object]]]:
    """Read the JSONL emitted by ``score``: one record per line with the
    full precision/recall/f1 triple."""
    entries: Dict[str, Dict[str, object]] = {}
    metric_name: Optional[str] = None
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                data = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise _fail(f"{path}: line {line_no} is not valid JSON: {exc}")
            for field in ("id", "metric", "precision", "recall", "f1"):
                if field not in data:
                    raise _fail(f"{path}: line {line_no} is missing {field!r}")
            if metric_name is None:
                metric_name = data["metric"]
            elif data["metric"] != metric_name:
                raise _fail(
                    f"{path}: line {line_no} mixes metrics "
                    f"({data['metric']!r} after {metric_name!r})"
                )
            if data["id"] in entries:
                raise _fail(f"{path}: line {line_no} repeats id {data['id']!r}")
            entries[data["id"]] = data
    if not entries:
        raise _fail(f"{path}: no score lines found")
    assert metric_name is not None
    return metric_name, entries


def _sniff_scores(
    path: str, measure: str
) -> Tuple[str, Dict[str, float], Optional[str], bool]:
    """Return (metric_name, id->score, measure-or-None, higher_is_consistent).

    Accepts either the native triple-per-line format (component picked by
    ``measure``) or the external header+score format.
    """
    with open(path, "r", encoding="utf-8") as fh:
        first = ""
        for raw in fh:
            if raw.strip():
                first = raw.strip()
                break
    if not first:
        raise _fail(f"{path}: empty score file")
    try:
        head = json.loads(first)
    except json.JSONDecodeError as exc:
        raise _fail(f"{path}: line 1 is not valid JSON: {exc}")
    if isinstance(head, dict) and "metric_name" in head and "id" not in head:
        external = load_external_scores(path)
        return (
            external.metric_name,
            dict(external.entries),
            None,
            external.higher_is_consistent,
        )
    metric_name, entries = _load_native_scores(path)
    scores = {rid: float(entry[measure]) for rid, entry in entries.items()}
    return metric_name, scores, measure, True


def _records_by_id(records: Sequence[BenchmarkRecord]) -> Dict[str, BenchmarkRecord]:
    return {record.id: record for record in records}


def _group_records(
    records: Sequence[BenchmarkRecord], group_by: str
) -> Dict[str, List[BenchmarkRecord]]:
    groups: Dict[str, List[BenchmarkRecord]] = {}
    for record in records:
        if group_by == "all":
            key = "all"
        elif group_by == "dataset":
            key = record.dataset
        elif group_by == "origin":
            key = record.origin.value
        else:
            raise _fail(f"unknown group-by {group_by!r}")
        groups.setdefault(key, []).append(record)
    return {key: groups[key] for key in sorted(groups)}


# ---------------------------------------------------------------------------
# subcommand: score


def _cmd_score(args: argparse.Namespace) -> int:
    _merge_config(
        args,
        {
            "metric": "sbertscore",
            "granularity": "sent:sent",
            "backend": "hashed",
            "dim": 256,
            "workers": 1,
            "max_tokens": 512,
        },
    )
    if args.corpus is None:
        raise _fail("score: --corpus is required")
    if args.metric not in METRIC_NAMES:
        raise _fail(f"score: unknown metric {args.metric!r}")
    if args.granularity not in _GRANULARITIES:
        raise _fail(f"score: unknown granularity {args.granularity!r}")
    source_mode, summary_mode = args.granularity.split(":")
    records = load_benchmark(args.corpus)

    provider = None
    if args.metric in ("sbertscore", "bertscore"):
        provider = build_provider(
            backend=args.backend,
            dimension=int(args.dim),
            model_id=args.model_id,
            endpoint=args.endpoint,
            cache_file=args.cache_file,
            max_tokens=int(args.max_tokens),
        )
    scorer = make_scorer(
        args.metric,
        provider=provider,
        summary_mode=summary_mode,
        source_mode=source_mode,
    )

    def score_one(record: BenchmarkRecord):
        try:
            return record.id, scorer.score(record.source, record.summary), None
        except (ValueError, EmbeddingError) as exc:
            return record.id, None, str(exc)

    workers = max(1, int(args.workers))
    if workers == 1:
        results = [score_one(record) for record in records]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(score_one, records))

    lines = []
    failures = 0
    for record_id, result, error in results:
        if error is not None:
            failures += 1
            print(f"error: record {record_id}: {error}", file=sys.stderr)
            continue
        payload = {
            "id": record_id,
            "metric": args.metric,
            "precision": result.triple.precision,
            "recall": result.triple.recall,
            "f1": result.triple.f1,
            "truncated_source": result.truncated_source,
            "truncated_summary": result.truncated_summary,
        }
        if result.triple.degenerate:
            payload["degenerate"] = True
        lines.append(json.dumps(payload, ensure_ascii=False))
    _write_text(args.out, "".join(line + "\n" for line in lines))
    if failures:
        print(f"error: {failures} record(s) failed to score", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# subcommand: calibrate


def _calibration_ids(
    records: Sequence[BenchmarkRecord], scores: Mapping[str, float], what: str
) -> None:
    missing = sorted({r.id for r in records} - set(scores))
    if missing:
        shown = ", ".join(repr(i) for i in missing[:10])
        raise _fail(f"{what}: {len(missing)} validation record(s) lack scores ({shown})")


def _cmd_calibrate(args: argparse.Namespace) -> int:
    _merge_config(args, {"measure": "precision", "group_by": "all"})
    for required in ("scores", "corpus"):
        if getattr(args, required) is None:
            raise _fail(f"calibrate: --{required} is required")
    if args.measure not in ("precision", "recall", "f1"):
        raise _fail(f"calibrate: unknown measure {args.measure!r}")
    metric_name, scores, measure, higher_is_consistent = _sniff_scores(
        args.scores, args.measure
    )
    if args.orientation is not None:
        orientation = Orientation(args.orientation)
    else:
        orientation = (
            Orientation.ABOVE if higher_is_consistent else Orientation.BELOW
        )
    records = load_benchmark(args.corpus)
    validation = [r for r in records if r.split is Split.VALIDATION]
    if not validation:
        raise _fail("calibrate: corpus has no validation-split records")
    _calibration_ids(validation, scores, "calibrate")

    groups = _group_records(validation, args.group_by)
    group_results: Dict[str, Dict[str, object]] = {}
    for key, members in groups.items():
        member_scores = {r.id: scores[r.id] for r in members}
        member_labels = {r.id: r.label for r in members}
        try:
            result = calibrate_threshold(member_scores, member_labels, orientation)
        except EvalError as exc:
            raise _fail(f"calibrate: group {key!r}: {exc}")
        group_results[key] = result.to_dict()

    payload = {
        "metric_name": metric_name,
        "measure": measure,
        "orientation": orientation.value,
        "group_by": args.group_by,
        "positive_class": "inconsistent",
        "groups": group_results,
    }
    _write_text(args.out, _dump_json(payload))
    if args.out is not None:
        for key in sorted(group_results):
            entry = group_results[key]
            print(
                f"calibrated {key}: threshold={entry['threshold']} "
                f"balanced_accuracy={entry['balanced_accuracy']:.4f}"
            )
    return 0


# ---------------------------------------------------------------------------
# subcommand: evaluate


def _load_thresholds(path: str) -> Dict[str, object]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise _fail(f"cannot read thresholds {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _fail(f"thresholds {path} is not valid JSON: {exc}") from exc
    for field in ("metric_name", "orientation", "group_by", "groups"):
        if field not in data:
            raise _fail(f"thresholds {path} is missing {field!r}")
    return data


def _cmd_evaluate(args: argparse.Namespace) -> int:
    _merge_config(args, {"split": "test"})
    for required in ("scores", "corpus", "thresholds"):
        if getattr(args, required) is None:
            raise _fail(f"evaluate: --{required} is required")
    thresholds = _load_thresholds(args.thresholds)
    group_by = thresholds["group_by"]
    if args.group_by is not None and args.group_by != group_by:
        raise _fail(
            f"evaluate: --group-by {args.group_by!r} conflicts with thresholds "
            f"file ({group_by!r})"
        )
    orientation = Orientation(thresholds["orientation"])
    measure = thresholds.get("measure") or "f1"
    metric_name, scores, sniffed_measure, _ = _sniff_scores(args.scores, measure)
    if thresholds["metric_name"] != metric_name:
        raise _fail(
            f"evaluate: thresholds are for {thresholds['metric_name']!r} but "
            f"scores are {metric_name!r}"
        )

    records = load_benchmark(args.corpus)
    if args.split == "all":
        chosen = records
    else:
        chosen = [r for r in records if r.split is Split(args.split)]
    if not chosen:
        raise _fail(f"evaluate: no records in split {args.split!r}")
    missing = sorted({r.id for r in chosen} - set(scores))
    if missing:
        shown = ", ".join(repr(i) for i in missing[:10])
        raise _fail(f"evaluate: {len(missing)} record(s) lack scores ({shown})")

    groups = _group_records(chosen, group_by)
    display_name = (
        f"{metric_name}.{sniffed_measure}" if sniffed_measure else metric_name
    )
    report_groups: Dict[str, Dict[str, object]] = {}
    all_predictions: Dict[str, Label] = {}
    evaluated_thresholds: List[float] = []
    text_lines = [
        f"metric: {display_name}  orientation: {orientation.value}  "
        f"split: {args.split}  grouped by: {group_by}"
    ]
    for key, members in groups.items():
        if key not in thresholds["groups"]:
            raise _fail(f"evaluate: no calibrated threshold for group {key!r}")
        threshold = _threshold_from_json(thresholds["groups"][key]["threshold"])
        member_scores = {r.id: scores[r.id] for r in members}
        member_labels = {r.id: r.label for r in members}
        label_values = set(member_labels.values())
        if len(members) == 0 or len(label_values) < 2:
            reason = (
                "empty group" if not members else "only one class present"
            )
            print(f"warning: skipping group {key!r}: {reason}", file=sys.stderr)
            report_groups[key] = {"skipped": reason, "n": len(members)}
            text_lines.append(f"  {key:<12} skipped ({reason})")
            continue
        predictions = predict_labels(member_scores, threshold, orientation)
        all_predictions.update(predictions)
        evaluated_thresholds.append(threshold)
        cm = confusion_matrix(member_labels, predictions)
        ba = balanced_accuracy(cm)
        auc_scores = (
            member_scores
            if orientation is Orientation.ABOVE
            else {k: -v for k, v in member_scores.items()}
        )
        auc = roc_auc(auc_scores, member_labels)
        recall_report = error_type_recall(members, predictions)
        report_groups[key] = {
            "n": len(members),
            "threshold": _threshold_to_json(threshold),
            "balanced_accuracy": ba,
            "roc_auc": auc,
            "confusion": cm.as_dict(),
            "error_type_recall": recall_report.as_dict(),
            "error_type_recall_omitted": list(recall_report.omitted),
        }
        text_lines.append(
            f"  {key:<12} n={len(members):<5} ba={ba:.4f} auc={auc:.4f} "
            f"tp={cm.tp} tn={cm.tn} fp={cm.fp} fn={cm.fn}"
        )

    payload = {
        "metric_name": metric_name,
        "measure": sniffed_measure,
        "orientation": orientation.value,
        "split": args.split,
        "group_by": group_by,
        "positive_class": "inconsistent",
        "confusion_convention": CONFUSION_CONVENTION,
        "groups": report_groups,
    }
    if args.out:
        _write_text(args.out, _dump_json(payload))
    print("\n".join(text_lines))
    if args.predictions_out:
        header_threshold = (
            evaluated_thresholds[0] if len(evaluated_thresholds) == 1 else None
        )
        pred_set = BinaryPredictionSet(
            metric_name=display_name,
            predictions=all_predictions,
            threshold=header_threshold,
            orientation=orientation,
        )
        write_predictions(pred_set, args.predictions_out)
    return 0


# ---------------------------------------------------------------------------
# subcommand: agree


def _cmd_agree(args: argparse.Namespace) -> int:
    _merge_config(args, {})
    paths = args.predictions or []
    if len(paths) < 2:
        raise _fail("agree: need at least two prediction files")
    sets = [load_predictions(path) for path in paths]
    names: List[str] = []
    for pred_set in sets:
        name = pred_set.metric_name
        suffix = 2
        while name in names:
            name = f"{pred_set.metric_name}#{suffix}"
            suffix += 1
        names.append(name)
    matrix: List[List[float]] = []
    for i, left in enumerate(sets):
        row = []
        for j, right in enumerate(sets):
            if i == j:
                row.append(1.0)
            else:
                row.append(cohen_kappa(left, right))
        matrix.append(row)
    payload = {"metrics": names, "kappa": matrix}
    if args.out:
        _write_text(args.out, _dump_json(payload))
    width = max(len(n) for n in names)
    print("pairwise Cohen's kappa")
    header = " " * (width + 2) + "  ".join(f"{n:>{width}}" for n in names)
    print(header)
    for name, row in zip(names, matrix):
        cells = "  ".join(f"{value:>{width}.4f}" for value in row)
        print(f"{name:<{width}}  {cells}")
    return 0


# ---------------------------------------------------------------------------
# subcommand: combine


def _cmd_combine(args: argparse.Namespace) -> int:
    _merge_config(args, {})
    paths = args.predictions or []
    if len(paths) != 2:
        raise _fail("combine: need exactly two prediction files")
    if args.op not in ("and", "or"):
        raise _fail(f"combine: --op must be 'and' or 'or', got {args.op!r}")
    first, second = (load_predictions(path) for path in paths)
    combined = combine(first, second, args.op)
    if args.out:
        write_predictions(combined, args.out)

    if args.corpus is None:
        return 0
    records = _records_by_id(load_benchmark(args.corpus))
    missing = sorted(set(combined.predictions) - set(records))
    if missing:
        shown = ", ".join(repr(i) for i in missing[:10])
        raise _fail(f"combine: {len(missing)} predicted id(s) not in corpus ({shown})")
    labels = {rid: records[rid].label for rid in combined.predictions}

    sections = {}
    matrices = {}
    for pred_set in (first, second, combined):
        cm = confusion_matrix(labels, pred_set)
        matrices[pred_set.metric_name] = cm
        sections[pred_set.metric_name] = {
            "balanced_accuracy": balanced_accuracy(cm),
            "confusion": cm.as_dict(),
        }
    payload = {
        "op": args.op,
        "inputs": [first.metric_name, second.metric_name],
        "combined": combined.metric_name,
        "positive_class": "inconsistent",
        "confusion_convention": CONFUSION_CONVENTION,
        "results": sections,
    }
    if args.op == "and":
        payload["and_dominance_holds"] = and_dominance_holds(
            matrices[combined.metric_name],
            matrices[first.metric_name],
            matrices[second.metric_name],
        )
    if args.report:
        _write_text(args.report, _dump_json(payload))
    for name in (first.metric_name, second.metric_name, combined.metric_name):
        entry = sections[name]
        print(f"{name}: balanced_accuracy={entry['balanced_accuracy']:.4f}")
    if args.op == "and":
        print(f"and-dominance holds: {payload['and_dominance_holds']}")
    return 0


# ---------------------------------------------------------------------------
# subcommand: bench


def _expected_cold_calls(records: Sequence[BenchmarkRecord]) -> int:
    """Sentence embeddings a cache-less scorer must compute: per record,
    the unique sentences within each side's batch."""
    total = 0
    for record in records:
        for text in (record.summary, record.source):
            sentences = [normalize_text(s) for s in split_sentences(text)]
            total += len(dict.fromkeys(sentences))
    return total


def _cmd_bench(args: argparse.Namespace) -> int:
    _merge_config(args, {"dim": 64, "metrics": "sbertscore"})
    if args.corpus is None:
        raise _fail("bench: --corpus is required")
    records = load_benchmark(args.corpus)
    if args.sample is not None:
        records = records[: int(args.sample)]
    if not records:
        raise _fail("bench: no records to bench")
    metric_list = [m.strip() for m in str(args.metrics).split(",") if m.strip()]
    for metric in metric_list:
        if metric not in METRIC_NAMES:
            raise _fail(f"bench: unknown metric {metric!r}")
    dimension = int(args.dim)

    # Cost identity: with no cache attached, a full pass must cost exactly
    # the per-batch-unique sentence count, no more and no less.
    cold_provider = build_provider(backend="hashed", dimension=dimension)
    cold_scorer = make_scorer("sbertscore", provider=cold_provider)
    start = time.perf_counter()
    for record in records:
        cold_scorer.score(record.source, record.summary)
    cold_seconds = time.perf_counter() - start
    expected = _expected_cold_calls(records)
    observed = cold_provider.call_count
    if observed != expected:
        print(
            f"error: cold embedding calls {observed} != expected {expected}",
            file=sys.stderr,
        )
        return 1

    # Warm identity: with a cache attached, a second identical pass must
    # add zero embedding calls.
    warm_provider = build_provider(backend="hashed", dimension=dimension)
    warm_provider.cache = InMemoryCache(warm_provider.model_id)
    warm_scorer = make_scorer("sbertscore", provider=warm_provider)
    for record in records:
        warm_scorer.score(record.source, record.summary)
    first_pass = warm_provider.call_count
    start = time.perf_counter()
    for record in records:
        warm_scorer.score(record.source, record.summary)
    warm_seconds = time.perf_counter() - start
    second_pass_new = warm_provider.call_count - first_pass
    if second_pass_new != 0:
        print(
            f"error: warm pass recomputed {second_pass_new} embeddings",
            file=sys.stderr,
        )
        return 1

    timings = {"sbertscore_cold": cold_seconds, "sbertscore_warm": warm_seconds}
    for metric in metric_list:
        if metric == "sbertscore":
            continue
        provider = (
            build_provider(backend="hashed", dimension=dimension)
            if metric == "bertscore"
            else None
        )
        scorer = make_scorer(metric, provider=provider)
        start = time.perf_counter()
        for record in records:
            scorer.score(record.source, record.summary)
        timings[metric] = time.perf_counter() - start

    payload = {
        "records": len(records),
        "dimension": dimension,
        "metrics": metric_list,
        "call_identity": {
            "expected_cold_calls": expected,
            "observed_cold_calls": observed,
            "matches": True,
        },
        "warm_cache": {
            "first_pass_calls": first_pass,
            "second_pass_new_calls": second_pass_new,
        },
    }
    if args.out:
        _write_text(args.out, _dump_json(payload))
    for name in sorted(timings):
        print(f"timing {name}: {timings[name]:.3f}s")
    print(
        f"cold calls {observed} (= expected); warm second pass added "
        f"{second_pass_new} calls"
    )
    return 0


# ---------------------------------------------------------------------------
# subcommand: synth


def _parse_mix(raw: Optional[str]) -> Optional[Dict[str, float]]:
    if raw is None:
        return None
    mix: Dict[str, float] = {}
    for part in str(raw).split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise _fail(f"synth: mix entry {part!r} must look like kind=weight")
        kind, _, weight = part.partition("=")
        try:
            mix[kind.strip()] = float(weight)
        except ValueError:
            raise _fail(f"synth: mix weight {weight!r} is not a number")
    if not mix:
        raise _fail("synth: --mix was given but holds no entries")
    return mix


def _cmd_synth(args: argparse.Namespace) -> int:
    _merge_config(
        args,
        {
            "consistent": 50,
            "inconsistent": 50,
            "seed": 0,
            "dataset": "synthetic",
            "validation_fraction": 0.5,
            "paraphrase_fraction": 0.5,
            "min_source_tokens": 0,
        },
    )
    if args.out is None:
        raise _fail("synth: --out is required")
    mix = _parse_mix(args.mix)
    kwargs = dict(
        n_consistent=int(args.consistent),
        n_inconsistent=int(args.inconsistent),
        dataset=str(args.dataset),
        validation_fraction=float(args.validation_fraction),
        paraphrase_fraction=float(args.paraphrase_fraction),
        min_source_tokens=int(args.min_source_tokens),
    )
    if mix is not None:
        kwargs["perturbation_mix"] = mix
    config = SynthConfig(**kwargs)
    records = generate_synthetic(config, seed=int(args.seed))
    save_benchmark(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="factsim",
        description=(
            "Score summary factual consistency against source documents and "
            "run the calibration/evaluation workflow."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--config",
            help="JSON file supplying defaults for any long option "
            "(explicit flags win)",
        )

    p = sub.add_parser("score", help="score every corpus record with one metric")
    p.add_argument("--corpus", help="benchmark JSONL file")
    p.add_argument("--metric", choices=METRIC_NAMES)
    p.add_argument(
        "--granularity",
        choices=_GRANULARITIES,
        help="source:summary embedding granularity (sbertscore only)",
    )
    p.add_argument("--backend", choices=("hashed", "cache", "http"))
    p.add_argument("--dim", type=int, help="embedding dimension (hashed backend)")
    p.add_argument("--model-id", dest="model_id")
    p.add_argument("--endpoint", help="embedding service URL (http backend)")
    p.add_argument("--cache-file", dest="cache_file")
    p.add_argument("--max-tokens", dest="max_tokens", type=int)
    p.add_argument("--workers", type=int, help="scoring threads (default 1)")
    p.add_argument("--out", help="output JSONL path (default stdout)")
    add_config(p)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser(
        "calibrate", help="pick thresholds on the validation split"
    )
    p.add_argument("--scores", help="score file (native or external format)")
    p.add_argument("--corpus")
    p.add_argument("--measure", choices=("precision", "recall", "f1"))
    p.add_argument("--group-by", dest="group_by", choices=("dataset", "origin", "all"))
    p.add_argument("--orientation", choices=("above", "below"))
    p.add_argument("--out", help="thresholds JSON path (default stdout)")
    add_config(p)
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("evaluate", help="apply thresholds and report quality")
    p.add_argument("--scores")
    p.add_argument("--corpus")
    p.add_argument("--thresholds", help="JSON produced by calibrate")
    p.add_argument(
        "--group-by",
        dest="group_by",
        choices=("dataset", "origin", "all"),
        help="must match the thresholds file if given",
    )
    p.add_argument("--split", choices=("validation", "test", "all"))
    p.add_argument("--out", help="report JSON path")
    p.add_argument("--predictions-out", dest="predictions_out")
    add_config(p)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("agree", help="pairwise Cohen's kappa between predictions")
    p.add_argument("--predictions", nargs="+", help="two or more prediction files")
    p.add_argument("--out", help="agreement JSON path")
    add_config(p)
    p.set_defaults(func=_cmd_agree)

    p = sub.add_parser("combine", help="logically combine two prediction files")
    p.add_argument("--predictions", nargs="+")
    p.add_argument("--op", choices=("and", "or"), required=True)
    p.add_argument("--corpus", help="corpus for the quality report")
    p.add_argument("--out", help="combined predictions path")
    p.add_argument("--report", help="report JSON path")
    add_config(p)
    p.set_defaults(func=_cmd_combine)

    p = sub.add_parser("bench", help="check embedding-call cost identities")
    p.add_argument("--corpus")
    p.add_argument("--sample", type=int, help="bench only the first N records")
    p.add_argument("--metrics", help="comma-separated metric list")
    p.add_argument("--dim", type=int)
    p.add_argument("--out", help="deterministic results JSON path")
    add_config(p)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("synth", help="generate a labeled synthetic corpus")
    p.add_argument("--consistent", type=int)
    p.add_argument("--inconsistent", type=int)
    p.add_argument(
        "--mix",
        help="comma-separated kind=weight pairs; kinds: " + ", ".join(PERTURBATIONS),
    )
    p.add_argument("--seed", type=int)
    p.add_argument("--dataset")
    p.add_argument(
        "--validation-fraction", dest="validation_fraction", type=float
    )
    p.add_argument(
        "--paraphrase-fraction", dest="paraphrase_fraction", type=float
    )
    p.add_argument(
        "--min-source-tokens", dest="min_source_tokens", type=int
    )
    p.add_argument("--out", help="corpus JSONL path")
    add_config(p)
    p.set_defaults(func=_cmd_synth)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (CorpusError, EvalError, EmbeddingError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
