from pathlib import Path

import pytest

from factsim.corpus import Attribute, BenchmarkRecord, ErrorType, Label, Locus, Origin, Split
from factsim.embed import HashedProvider

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def provider():
    """Small deterministic embedding backend for metric tests."""
    return HashedProvider(dimension=64)


@pytest.fixture
def fixture_corpus_path():
    return DATA_DIR / "fixture6.jsonl"


@pytest.fixture
def record_factory():
    """Build valid benchmark records with overridable fields."""

    def build(record_id="r1", **overrides):
        fields = dict(
            id=record_id,
            source="The cat sat on the mat. The dog barked loudly.",
            summary="The cat sat on the mat.",
            label=Label.CONSISTENT,
            dataset="cnndm",
            origin=Origin.CNNDM,
            split=Split.VALIDATION,
            error_types=(),
        )
        fields.update(overrides)
        return BenchmarkRecord(**fields)

    return build


@pytest.fixture
def inconsistent_error():
    return ErrorType(locus=Locus.INTRINSIC, attribute=Attribute.NOUN_PHRASE)
