"""Deterministic hashed bag-of-words embeddings.

This is the service's no-dependency backend: every token lands on one
coordinate chosen by its 64-bit FNV-1a hash, contributes +1 or -1 by the
hash's top bit, and the accumulated vector is L2-normalized. The pipeline
(lowercase, whitespace split, edge-punctuation strip, whitespace truncation
before hashing) is a compatibility contract with hashed-backend clients:
given the same text, both sides must produce bit-identical vectors.
"""

from __future__ import annotations

import string
import unicodedata
from typing import List, Tuple

import numpy as np

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_WRAP = (1 << 64) - 1
_TOP_BIT = 1 << 63

# Plain ASCII punctuation plus the typographic quotes/dashes/ellipsis that
# survive a .lower().split() pass.
_EDGE_CHARS = string.punctuation + "“”‘’…—–"


def fnv1a(data: "str | bytes") -> int:
    """64-bit FNV-1a over UTF-8 bytes."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    value = FNV_OFFSET
    for byte in data:
        value = ((value ^ byte) * FNV_PRIME) & _WRAP
    return value


def canonical(text: str) -> str:
    """NFC-normalize and trim, the canonical hashing form."""
    return unicodedata.normalize("NFC", text).strip()


def simple_tokens(text: str) -> List[str]:
    """Lowercase whitespace tokens with edge punctuation stripped."""
    out = []
    for piece in text.lower().split():
        cleaned = piece.strip(_EDGE_CHARS)
        if cleaned:
            out.append(cleaned)
    return out


def _accumulate(tokens: List[str], dimension: int) -> np.ndarray:
    acc = np.zeros(dimension, dtype=np.float64)
    for token in tokens:
        h = fnv1a(token)
        acc[h % dimension] += -1.0 if h & _TOP_BIT else 1.0
    length = float(np.linalg.norm(acc))
    if length > 0.0:
        acc /= length
    return acc


def sentence_vector(
    text: str, dimension: int, max_tokens: int
) -> Tuple[np.ndarray, bool]:
    """Embed one text; truncate to ``max_tokens`` whitespace words first."""
    words = text.split()
    truncated = len(words) > max_tokens
    if truncated:
        text = " ".join(words[:max_tokens])
    return _accumulate(simple_tokens(text), dimension), truncated


def token_vectors(
    text: str, dimension: int, max_tokens: int
) -> Tuple[List[np.ndarray], List[str], bool]:
    """Per-token unit vectors plus the token strings actually served."""
    tokens = simple_tokens(text)
    if not tokens:
        raise ValueError("text has no tokens after tokenization")
    truncated = len(tokens) > max_tokens
    if truncated:
        tokens = tokens[:max_tokens]
    return [_accumulate([tok], dimension) for tok in tokens], tokens, truncated
