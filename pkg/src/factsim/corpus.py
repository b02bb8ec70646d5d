"""Benchmark corpus types and JSONL IO.

A corpus is a JSONL file (UTF-8, LF line endings) with one record per line.
Unknown extra fields on any line are ignored so files can carry annotations
this library does not know about.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Mapping, Sequence

__all__ = [
    "Attribute",
    "BenchmarkRecord",
    "CorpusError",
    "ErrorType",
    "ExternalScoreSet",
    "Label",
    "Locus",
    "Origin",
    "Split",
    "load_benchmark",
    "load_external_scores",
    "record_to_dict",
    "save_benchmark",
]


class CorpusError(ValueError):
    """Raised for malformed or invariant-violating corpus data."""


class Label(str, Enum):
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"


class Origin(str, Enum):
    CNNDM = "cnndm"
    XSUM = "xsum"


class Split(str, Enum):
    VALIDATION = "validation"
    TEST = "test"


class Locus(str, Enum):
    INTRINSIC = "intrinsic"
    EXTRINSIC = "extrinsic"


class Attribute(str, Enum):
    NOUN_PHRASE = "noun_phrase"
    PREDICATE = "predicate"
    SENTENCE = "sentence"


@dataclass(frozen=True)
class ErrorType:
    """A factual error category: where it came from and what it touches."""

    locus: Locus
    attribute: Attribute

    @property
    def key(self) -> str:
        return f"{self.locus.value}/{self.attribute.value}"

    def to_dict(self) -> Dict[str, str]:
        return {"locus": self.locus.value, "attribute": self.attribute.value}


def _coerce_enum(cls, value, field_name: str, record_id: str):
    try:
        return cls(value)
    except ValueError:
        allowed = ", ".join(m.value for m in cls)
        raise CorpusError(
            f"record {record_id!r}: field {field_name!r} must be one of "
            f"[{allowed}], got {value!r}"
        ) from None


@dataclass(frozen=True)
class BenchmarkRecord:
    """One labeled (source document, summary) pair."""

    id: str
    dataset: str
    origin: Origin
    split: Split
    source: str
    summary: str
    label: Label
    error_types: FrozenSet[ErrorType] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if not isinstance(self.error_types, frozenset):
            object.__setattr__(self, "error_types", frozenset(self.error_types))
        if not self.id:
            raise CorpusError("record id must be non-empty")
        for name in ("source", "summary"):
            value = getattr(self, name)
            if not value or not value.strip():
                raise CorpusError(
                    f"record {self.id!r}: field {name!r} must be non-empty"
                )
        if self.label is Label.CONSISTENT and self.error_types:
            raise CorpusError(
                f"record {self.id!r}: field 'error_types' must be empty "
                "for a consistent record"
            )
        if self.origin is not Origin.XSUM and any(
            e.attribute is Attribute.SENTENCE for e in self.error_types
        ):
            raise CorpusError(
                f"record {self.id!r}: field 'error_types' carries a "
                "sentence-level error but origin is not 'xsum'"
            )


def _record_from_dict(data: Mapping, line_no: int) -> BenchmarkRecord:
    missing = [
        k
        for k in ("id", "dataset", "origin", "split", "source", "summary", "label")
        if k not in data
    ]
    if missing:
        raise CorpusError(f"line {line_no}: missing fields {missing}")
    record_id = data["id"]
    if not isinstance(record_id, str) or not record_id:
        raise CorpusError(f"line {line_no}: field 'id' must be a non-empty string")
    raw_errors = data.get("error_types", [])
    if not isinstance(raw_errors, list):
        raise CorpusError(
            f"record {record_id!r}: field 'error_types' must be an array"
        )
    error_types = set()
    for entry in raw_errors:
        if not isinstance(entry, Mapping) or "locus" not in entry or "attribute" not in entry:
            raise CorpusError(
                f"record {record_id!r}: each error type needs 'locus' and 'attribute'"
            )
        error_types.add(
            ErrorType(
                locus=_coerce_enum(Locus, entry["locus"], "locus", record_id),
                attribute=_coerce_enum(Attribute, entry["attribute"], "attribute", record_id),
            )
        )
    for name in ("source", "summary"):
        if not isinstance(data[name], str):
            raise CorpusError(
                f"record {record_id!r}: field {name!r} must be a string"
            )
    return BenchmarkRecord(
        id=record_id,
        dataset=str(data["dataset"]),
        origin=_coerce_enum(Origin, data["origin"], "origin", record_id),
        split=_coerce_enum(Split, data["split"], "split", record_id),
        source=data["source"],
        summary=data["summary"],
        label=_coerce_enum(Label, data["label"], "label", record_id),
        error_types=frozenset(error_types),
    )


def load_benchmark(path: "str | Path") -> List[BenchmarkRecord]:
    """Load benchmark records from a JSONL file.

    Raises:
        CorpusError: on JSON parse failures (with the line number), missing
            or invalid fields (with the record id), or duplicate ids.
    """
    records: List[BenchmarkRecord] = []
    seen: Dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {line_no}: invalid JSON ({exc.msg})") from None
            if not isinstance(data, dict):
                raise CorpusError(f"line {line_no}: expected a JSON object")
            record = _record_from_dict(data, line_no)
            if record.id in seen:
                raise CorpusError(
                    f"duplicate id {record.id!r} at line {line_no} "
                    f"(first seen at line {seen[record.id]})"
                )
            seen[record.id] = line_no
            records.append(record)
    if not records:
        raise CorpusError(f"{path}: corpus contains no records")
    return records


def record_to_dict(record: BenchmarkRecord) -> Dict:
    return {
        "id": record.id,
        "dataset": record.dataset,
        "origin": record.origin.value,
        "split": record.split.value,
        "source": record.source,
        "summary": record.summary,
        "label": record.label.value,
        "error_types": [
            e.to_dict()
            for e in sorted(record.error_types, key=lambda e: e.key)
        ],
    }


def save_benchmark(records: Iterable[BenchmarkRecord], path: "str | Path") -> None:
    """Write records as JSONL (UTF-8, LF)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(json.dumps(record_to_dict(record), ensure_ascii=False))
            fh.write("\n")


@dataclass(frozen=True)
class ExternalScoreSet:
    """Scores produced outside this library, keyed by record id."""

    metric_name: str
    entries: Mapping[str, float]
    higher_is_consistent: bool = True

    def validate_against(self, corpus_ids: Sequence[str]) -> None:
        unknown = sorted(set(self.entries) - set(corpus_ids))
        if unknown:
            shown = ", ".join(repr(u) for u in unknown[:10])
            raise CorpusError(
                f"score set {self.metric_name!r} has {len(unknown)} ids not in "
                f"the corpus: {shown}"
            )


def load_external_scores(path: "str | Path") -> ExternalScoreSet:
    """Load an external score file: a header line then one entry per line.

    The header must carry ``metric_name`` and may carry
    ``higher_is_consistent`` (default true). Entries are objects with ``id``
    and a numeric ``score``.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [(no, ln) for no, ln in enumerate(fh, start=1) if ln.strip()]
    if not lines:
        raise CorpusError(f"{path}: empty score file (missing header)")

    def parse(line_no: int, line: str) -> dict:
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"line {line_no}: invalid JSON ({exc.msg})") from None
        if not isinstance(data, dict):
            raise CorpusError(f"line {line_no}: expected a JSON object")
        return data

    header_no, header_line = lines[0]
    header = parse(header_no, header_line)
    if "metric_name" not in header:
        raise CorpusError(f"line {header_no}: header is missing 'metric_name'")
    metric_name = str(header["metric_name"])
    higher = header.get("higher_is_consistent", True)
    if not isinstance(higher, bool):
        raise CorpusError(
            f"line {header_no}: 'higher_is_consistent' must be a boolean"
        )

    entries: Dict[str, float] = {}
    for line_no, line in lines[1:]:
        data = parse(line_no, line)
        if "id" not in data or "score" not in data:
            raise CorpusError(f"line {line_no}: entry needs 'id' and 'score'")
        entry_id = data["id"]
        score = data["score"]
        if not isinstance(entry_id, str) or not entry_id:
            raise CorpusError(f"line {line_no}: 'id' must be a non-empty string")
        if isinstance(score, bool) or not isinstance(score, (int, float)):
            raise CorpusError(
                f"line {line_no}: score for id {entry_id!r} is not a number"
            )
        if entry_id in entries:
            raise CorpusError(f"line {line_no}: duplicate score for id {entry_id!r}")
        entries[entry_id] = float(score)
    if not entries:
        raise CorpusError(f"{path}: score file holds a header but no entries")
    return ExternalScoreSet(
        metric_name=metric_name, entries=entries, higher_is_consistent=higher
    )
