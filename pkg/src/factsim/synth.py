"""Deterministic synthetic benchmark generator.

Source documents are rendered from slot templates over the built-in
lexicons. Consistent summaries copy or lightly paraphrase source sentences;
inconsistent summaries additionally receive exactly one kind of factual
perturbation, and the record's error types are derived from it. The whole
corpus is a pure function of (config, seed).
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .corpus import (
    Attribute,
    BenchmarkRecord,
    ErrorType,
    Label,
    Locus,
    Origin,
    Split,
)
from .segment import tokenize
from . import wordlists as words

__all__ = ["PERTURBATIONS", "SynthConfig", "generate_synthetic"]

PERTURBATIONS = (
    "entity_swap",
    "entity_insert",
    "verb_antonym",
    "off_topic_sentence",
)

_ATTRIBUTE_FOR = {
    "entity_swap": Attribute.NOUN_PHRASE,
    "entity_insert": Attribute.NOUN_PHRASE,
    "verb_antonym": Attribute.PREDICATE,
    "off_topic_sentence": Attribute.SENTENCE,
}


def _default_mix() -> Dict[str, float]:
    return {name: 1.0 for name in PERTURBATIONS}


@dataclass(frozen=True)
class SynthConfig:
    """Shape of a generated corpus.

    ``perturbation_mix`` gives relative weights for the inconsistent record
    kinds. ``paraphrase_fraction`` is the share of consistent records whose
    summary sentences are paraphrased (synonym-substituted) instead of
    copied verbatim. ``min_source_tokens`` pads sources with extra filler
    sentences (shuffled into the document) until the whitespace token count
    reaches the bound, which is how truncation behavior gets exercised.
    """

    n_consistent: int
    n_inconsistent: int
    perturbation_mix: Mapping[str, float] = field(default_factory=_default_mix)
    paraphrase_fraction: float = 0.5
    validation_fraction: float = 0.5
    dataset: str = "synthetic"
    min_source_sentences: int = 4
    max_source_sentences: int = 8
    min_summary_sentences: int = 1
    max_summary_sentences: int = 3
    min_source_tokens: int = 0

    def __post_init__(self) -> None:
        if self.n_consistent < 0 or self.n_inconsistent < 0:
            raise ValueError(
                f"record counts must be non-negative, got {self.n_consistent} "
                f"and {self.n_inconsistent}"
            )
        if self.n_consistent + self.n_inconsistent == 0:
            raise ValueError("at least one record must be requested")
        unknown = sorted(set(self.perturbation_mix) - set(PERTURBATIONS))
        if unknown:
            raise ValueError(f"unknown perturbation kinds: {unknown}")
        if any(w < 0 for w in self.perturbation_mix.values()):
            raise ValueError("perturbation weights must be non-negative")
        if not any(w > 0 for w in self.perturbation_mix.values()):
            raise ValueError("perturbation mix must have positive total weight")
        for name in ("paraphrase_fraction", "validation_fraction"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")
        if self.min_source_sentences < 2:
            raise ValueError("sources need at least 2 sentences")
        if self.max_source_sentences < self.min_source_sentences:
            raise ValueError("max_source_sentences < min_source_sentences")
        if self.min_summary_sentences < 1:
            raise ValueError("summaries need at least 1 sentence")
        if self.max_summary_sentences < self.min_summary_sentences:
            raise ValueError("max_summary_sentences < min_summary_sentences")
        if self.min_source_tokens < 0:
            raise ValueError("min_source_tokens must be >= 0")
        if not self.dataset:
            raise ValueError("dataset name must be non-empty")


@dataclass(frozen=True)
class _Slots:
    template: int
    entity: str
    verb: str
    adj: str
    noun: str
    place: str
    day: str
    role: str


_PARAPHRASABLE = {
    0: ("adj", "noun", "place"),
    1: ("noun", "place"),
    2: ("adj", "noun"),
    3: ("noun", "place"),
}


def _render(s: _Slots, synonym_slot: Optional[str] = None) -> str:
    adj, noun, place = s.adj, s.noun, s.place
    if synonym_slot == "adj":
        adj = words.SYNONYMS[adj]
    elif synonym_slot == "noun":
        noun = words.SYNONYMS[noun]
    elif synonym_slot == "place":
        place = words.SYNONYMS[place]
    if s.template == 0:
        return f"{s.entity} {s.verb} the {adj} {noun} at the {place} on {s.day}."
    if s.template == 1:
        return f"On {s.day} {s.entity} {s.verb} the {noun} near the {place}."
    if s.template == 2:
        return f"The {s.role} watched as {s.entity} {s.verb} the {adj} {noun}."
    return f"Officials reported that {s.entity} {s.verb} the {noun} at the {place}."


def _draw_slots(rng: random.Random, entity: str) -> _Slots:
    return _Slots(
        template=rng.randrange(4),
        entity=entity,
        verb=rng.choice(words.VERBS),
        adj=rng.choice(words.ADJECTIVES),
        noun=rng.choice(words.NOUNS),
        place=rng.choice(words.PLACES),
        day=rng.choice(words.DAYS),
        role=rng.choice(words.ROLES),
    )


@dataclass
class _Draft:
    source: str
    summary: str
    label: Label
    origin: Origin
    error_types: frozenset


def _token_count(sentences: Sequence[str]) -> int:
    return sum(len(s.split()) for s in sentences)


def _locus_for(replacement: str, source_tokens: frozenset) -> Locus:
    replaced = tokenize(replacement).tokens
    if replaced and all(tok in source_tokens for tok in replaced):
        return Locus.INTRINSIC
    return Locus.EXTRINSIC


def _build_document(
    rng: random.Random, config: SynthConfig
) -> Tuple[List[_Slots], List[int]]:
    """Return the shuffled source sentence slots and the core indices."""
    n_core = rng.randint(config.min_source_sentences, config.max_source_sentences)
    entity_pool = list(words.SOURCE_ENTITIES)
    rng.shuffle(entity_pool)
    slots = [_draw_slots(rng, entity_pool.pop()) for _ in range(n_core)]
    while (
        config.min_source_tokens
        and _token_count([_render(s) for s in slots]) < config.min_source_tokens
    ):
        if not entity_pool:
            raise ValueError(
                "min_source_tokens exceeds what the entity lexicon can pad; "
                "lower it or shorten the documents"
            )
        slots.append(_draw_slots(rng, entity_pool.pop()))
    core = list(range(len(slots)))[:n_core]
    order = list(range(len(slots)))
    rng.shuffle(order)
    shuffled = [slots[i] for i in order]
    core_positions = sorted(order.index(i) for i in core)
    return shuffled, core_positions


def _summary_plan(
    rng: random.Random, config: SynthConfig, core_positions: List[int]
) -> List[int]:
    upper = min(config.max_summary_sentences, len(core_positions))
    lower = min(config.min_summary_sentences, upper)
    count = rng.randint(lower, upper)
    return sorted(rng.sample(core_positions, count))


def _consistent_draft(rng: random.Random, config: SynthConfig) -> _Draft:
    slots, core_positions = _build_document(rng, config)
    chosen = _summary_plan(rng, config, core_positions)
    paraphrase = rng.random() < config.paraphrase_fraction
    summary_sentences = []
    for idx in chosen:
        slot_name = (
            rng.choice(_PARAPHRASABLE[slots[idx].template]) if paraphrase else None
        )
        summary_sentences.append(_render(slots[idx], synonym_slot=slot_name))
    return _Draft(
        source=" ".join(_render(s) for s in slots),
        summary=" ".join(summary_sentences),
        label=Label.CONSISTENT,
        origin=rng.choice((Origin.CNNDM, Origin.XSUM)),
        error_types=frozenset(),
    )


def _inconsistent_draft(
    rng: random.Random, config: SynthConfig, kind: str
) -> _Draft:
    slots, core_positions = _build_document(rng, config)
    chosen = _summary_plan(rng, config, core_positions)
    source_sentences = [_render(s) for s in slots]
    source_tokens = frozenset(tokenize(" ".join(source_sentences)).tokens)

    summary_sentences: List[str] = []
    loci = set()
    if kind == "off_topic_sentence":
        replacements = rng.sample(words.OFF_TOPIC_SENTENCES, len(chosen))
        for replacement in replacements:
            summary_sentences.append(replacement)
            loci.add(_locus_for(replacement, source_tokens))
    else:
        for idx in chosen:
            base = slots[idx]
            slot_name = rng.choice(_PARAPHRASABLE[base.template])
            if kind == "entity_swap":
                other = rng.choice(
                    [i for i in range(len(slots)) if slots[i].entity != base.entity]
                )
                replacement = slots[other].entity
                perturbed = replace(base, entity=replacement)
            elif kind == "entity_insert":
                replacement = rng.choice(words.NOVEL_ENTITIES)
                perturbed = replace(base, entity=replacement)
            elif kind == "verb_antonym":
                replacement = words.VERB_ANTONYMS[base.verb]
                perturbed = replace(base, verb=replacement)
            else:
                raise ValueError(f"unknown perturbation kind {kind!r}")
            loci.add(_locus_for(replacement, source_tokens))
            summary_sentences.append(_render(perturbed, synonym_slot=slot_name))

    attribute = _ATTRIBUTE_FOR[kind]
    error_types = frozenset(ErrorType(locus=l, attribute=attribute) for l in loci)
    origin = (
        Origin.XSUM
        if attribute is Attribute.SENTENCE
        else rng.choice((Origin.CNNDM, Origin.XSUM))
    )
    return _Draft(
        source=" ".join(source_sentences),
        summary=" ".join(summary_sentences),
        label=Label.INCONSISTENT,
        origin=origin,
        error_types=error_types,
    )


def generate_synthetic(config: SynthConfig, seed: int) -> List[BenchmarkRecord]:
    """Generate a labeled corpus; identical (config, seed) gives identical output."""
    rng = random.Random(seed)
    kinds = sorted(k for k, w in config.perturbation_mix.items() if w > 0)
    weights = [config.perturbation_mix[k] for k in kinds]

    drafts = [_consistent_draft(rng, config) for _ in range(config.n_consistent)]
    for _ in range(config.n_inconsistent):
        kind = rng.choices(kinds, weights=weights, k=1)[0]
        drafts.append(_inconsistent_draft(rng, config, kind))
    rng.shuffle(drafts)

    splits: Dict[int, Split] = {}
    for label in (Label.CONSISTENT, Label.INCONSISTENT):
        indices = [i for i, d in enumerate(drafts) if d.label is label]
        rng.shuffle(indices)
        n_validation = math.ceil(config.validation_fraction * len(indices))
        for rank, i in enumerate(indices):
            splits[i] = Split.VALIDATION if rank < n_validation else Split.TEST

    width = max(4, len(str(len(drafts))))
    return [
        BenchmarkRecord(
            id=f"{config.dataset}-{i:0{width}d}",
            dataset=config.dataset,
            origin=draft.origin,
            split=splits[i],
            source=draft.source,
            summary=draft.summary,
            label=draft.label,
            error_types=draft.error_types,
        )
        for i, draft in enumerate(drafts)
    ]
