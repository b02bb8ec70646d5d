"""Rule-based text segmentation: sentence splitting, tokenization, truncation."""
from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterator, Sequence, Tuple

__all__ = [
    "ABBREVIATIONS",
    "SentenceSet",
    "TokenSequence",
    "fnv1a_64",
    "split_sentences",
    "tokenize",
    "truncate_tokens",
]

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a_64(data: "str | bytes") -> int:
    """64-bit FNV-1a hash of a string (UTF-8) or byte sequence."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


# Words that end with a period without ending a sentence. Matching is exact
# (case-sensitive) against the token as written, period included.
ABBREVIATIONS = frozenset(
    {
        # honorifics and titles
        "Mr.", "Mrs.", "Ms.", "Dr.", "Prof.", "Rev.", "Hon.", "Gen.", "Sen.",
        "Rep.", "Gov.", "Capt.", "Col.", "Sgt.", "Lt.", "Maj.", "Adm.",
        # names and suffixes
        "Jr.", "Sr.", "St.",
        # corporate
        "Inc.", "Ltd.", "Co.", "Corp.", "Dept.",
        # months
        "Jan.", "Feb.", "Mar.", "Apr.", "Jun.", "Jul.", "Aug.", "Sep.",
        "Sept.", "Oct.", "Nov.", "Dec.",
        # places and geography
        "U.S.", "U.K.", "U.N.", "E.U.", "U.S.A.", "D.C.", "Mt.", "Ft.",
        "Ave.", "Blvd.", "Rd.",
        # latin and misc
        "e.g.", "i.e.", "etc.", "cf.", "vs.", "al.", "ca.", "No.", "pp.",
        "p.", "Vol.", "Fig.", "approx.", "est.",
    }
)

_TERMINATORS = ".!?"
_CLOSERS = "\"')]}”’"
_OPENERS = "\"'([{“‘"

# Punctuation stripped from token edges; ASCII plus common typographic marks.
_EDGE_PUNCT = string.punctuation + "“”‘’…—–"


@dataclass(frozen=True)
class TokenSequence:
    """An ordered sequence of normalized tokens."""

    tokens: Tuple[str, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[str]:
        return iter(self.tokens)

    def __getitem__(self, index: int) -> str:
        return self.tokens[index]


@dataclass(frozen=True)
class SentenceSet:
    """Sentences split from one text, tagged with a hash of that text."""

    sentences: Tuple[str, ...]
    source_text_hash: int

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[str]:
        return iter(self.sentences)


def _starts_sentence(ch: str) -> bool:
    return ch.isupper() or ch.isdigit() or ch in _OPENERS


def _word_ending_at(text: str, period_index: int) -> str:
    start = period_index
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start : period_index + 1]


def split_sentences(text: str) -> SentenceSet:
    """Split text into sentences with a terminator/abbreviation rule set.

    A boundary is a run of ``.!?`` (plus any closing quotes or brackets)
    followed by whitespace and an uppercase letter, digit, or opening quote.
    Periods ending a known abbreviation do not split. Text with no terminator
    is one sentence. Raises ValueError on empty or whitespace-only input.
    """
    if not text or not text.strip():
        raise ValueError("cannot split empty or whitespace-only text")

    n = len(text)
    spans = []
    start = 0
    i = 0
    while i < n:
        if text[i] not in _TERMINATORS:
            i += 1
            continue
        run_end = i
        while run_end + 1 < n and text[run_end + 1] in _TERMINATORS:
            run_end += 1
        close_end = run_end
        while close_end + 1 < n and text[close_end + 1] in _CLOSERS:
            close_end += 1
        nxt = close_end + 1
        if nxt < n and text[nxt].isspace():
            follow = nxt
            while follow < n and text[follow].isspace():
                follow += 1
            if follow < n and _starts_sentence(text[follow]):
                is_abbrev = (
                    text[i] == "."
                    and run_end == i
                    and _word_ending_at(text, i) in ABBREVIATIONS
                )
                if not is_abbrev:
                    spans.append((start, close_end + 1))
                    start = follow
                    i = follow
                    continue
        i = close_end + 1
    if start < n:
        spans.append((start, n))

    sentences = tuple(
        stripped for s, e in spans if (stripped := text[s:e].strip())
    )
    return SentenceSet(sentences=sentences, source_text_hash=fnv1a_64(text))


def tokenize(text: str) -> TokenSequence:
    """Lowercase, split on whitespace, strip edge punctuation, drop empties."""
    tokens = []
    for raw in text.lower().split():
        token = raw.strip(_EDGE_PUNCT)
        if token:
            tokens.append(token)
    return TokenSequence(tokens=tuple(tokens))


def truncate_tokens(
    seq: "TokenSequence | Sequence[str]", limit: int
) -> Tuple[TokenSequence, bool]:
    """Keep the first ``limit`` tokens; return (sequence, truncated_flag)."""
    if limit < 1:
        raise ValueError(f"token limit must be >= 1, got {limit}")
    tokens = tuple(seq.tokens if isinstance(seq, TokenSequence) else seq)
    if len(tokens) <= limit:
        return TokenSequence(tokens=tokens), False
    return TokenSequence(tokens=tokens[:limit]), True
