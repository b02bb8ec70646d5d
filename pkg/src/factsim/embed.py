"""Embedding vectors, deterministic hashed embeddings, caches, providers.

Three interchangeable backends produce sentence or token vectors: a
deterministic hashed bag-of-words embedder (no model needed), a reader over
precomputed vector files, and an HTTP client for an embedding sidecar.

Call accounting: ``call_count`` grows by the number of texts a request
actually computes (or fetches), after per-batch deduplication and after any
configured cache is consulted. A provider with no cache never memoizes
across requests, so scoring one record from cold costs exactly one call per
summary sentence plus one per source sentence.
"""
from __future__ import annotations

import abc
import hashlib
import json
import threading
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import requests

from .segment import fnv1a_64, tokenize

__all__ = [
    "EmbeddingCache",
    "EmbeddingError",
    "EmbeddingProvider",
    "EmbeddingVector",
    "HashedProvider",
    "HttpProvider",
    "InMemoryCache",
    "TokenEmbeddings",
    "VectorFileProvider",
    "build_provider",
    "cache_key",
    "hashed_embedding",
    "mean_embedding",
    "normalize_text",
]

DEFAULT_MAX_TOKENS = 512


class EmbeddingError(ValueError):
    """Raised when an embedding request cannot be served."""


def normalize_text(text: str) -> str:
    """NFC-normalize and trim; the canonical form for hashing and caching."""
    return unicodedata.normalize("NFC", text).strip()


def cache_key(text: str) -> str:
    return hashlib.sha256(normalize_text(text).encode("utf-8")).hexdigest()


class EmbeddingVector:
    """An immutable float32 vector with a cached L2 norm."""

    __slots__ = ("_values", "_norm")

    def __init__(self, values) -> None:
        arr = np.asarray(values, dtype=np.float32).reshape(-1)
        arr.setflags(write=False)
        self._values = arr
        self._norm = float(np.linalg.norm(arr.astype(np.float64)))

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def norm(self) -> float:
        return self._norm

    @property
    def dimension(self) -> int:
        return int(self._values.shape[0])

    def __len__(self) -> int:
        return self.dimension

    def __repr__(self) -> str:
        return f"EmbeddingVector(dim={self.dimension}, norm={self._norm:.6g})"


def hashed_embedding(text: str, dimension: int) -> EmbeddingVector:
    """Deterministic bag-of-words embedding.

    Each token contributes +1 or -1 (by the top bit of its 64-bit FNV-1a
    hash) to the component indexed by ``hash % dimension``; the sum is then
    L2-normalized. Tokenization-empty text maps to the zero vector.
    """
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")
    acc = np.zeros(dimension, dtype=np.float64)
    for token in tokenize(text):
        h = fnv1a_64(token)
        sign = 1.0 if (h >> 63) == 0 else -1.0
        acc[h % dimension] += sign
    norm = np.linalg.norm(acc)
    if norm > 0.0:
        acc /= norm
    return EmbeddingVector(acc)


def mean_embedding(vectors: Sequence[EmbeddingVector]) -> EmbeddingVector:
    """Componentwise mean of same-dimension vectors (not re-normalized)."""
    if not vectors:
        raise ValueError("cannot average an empty list of vectors")
    dims = {v.dimension for v in vectors}
    if len(dims) > 1:
        raise ValueError(f"mixed dimensions {sorted(dims)} cannot be averaged")
    stacked = np.stack([v.values.astype(np.float64) for v in vectors])
    return EmbeddingVector(stacked.mean(axis=0))


@dataclass(frozen=True)
class _CacheEntry:
    vector: EmbeddingVector
    truncated: bool


class InMemoryCache:
    """Process-local vector cache bound to one model id."""

    def __init__(self, model_id: str, dimension: Optional[int] = None) -> None:
        self.model_id = model_id
        self.dimension = dimension
        self._entries: Dict[str, _CacheEntry] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, key: str) -> Optional[_CacheEntry]:
        return self._entries.get(key)

    def put(self, key: str, vector: EmbeddingVector, truncated: bool = False) -> None:
        with self._lock:
            self._entries[key] = _CacheEntry(vector=vector, truncated=truncated)

    def close(self) -> None:  # interface parity with EmbeddingCache
        pass


class EmbeddingCache:
    """File-backed vector cache: a JSON header line, then one entry per line.

    Header: ``{"model_id": ..., "dimension": ...}``. Entries:
    ``{"key": <sha-256 hex of the normalized text>, "vector": [...]}`` plus
    an optional ``"truncated"`` flag. Reads are concurrent; writes are
    serialized appends, so a rereads sees bit-identical vectors.
    """

    def __init__(self, path: "str | Path", model_id: str, dimension: int) -> None:
        self.path = Path(path)
        self.model_id = model_id
        self.dimension = dimension
        self._entries: Dict[str, _CacheEntry] = {}
        self._lock = threading.Lock()
        if self.path.exists() and self.path.stat().st_size > 0:
            self._load()
        else:
            header = {"model_id": model_id, "dimension": dimension}
            with open(self.path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(json.dumps(header) + "\n")
        self._appender = open(self.path, "a", encoding="utf-8", newline="\n")

    def _load(self) -> None:
        with open(self.path, "r", encoding="utf-8") as fh:
            header_line = fh.readline()
            try:
                header = json.loads(header_line)
            except json.JSONDecodeError:
                raise EmbeddingError(f"{self.path}: cache header is not valid JSON")
            if header.get("model_id") != self.model_id:
                raise EmbeddingError(
                    f"{self.path}: cache built for model "
                    f"{header.get('model_id')!r}, not {self.model_id!r}"
                )
            if header.get("dimension") != self.dimension:
                raise EmbeddingError(
                    f"{self.path}: cache dimension {header.get('dimension')} "
                    f"does not match {self.dimension}"
                )
            for line_no, line in enumerate(fh, start=2):
                if not line.strip():
                    continue
                entry = json.loads(line)
                vector = EmbeddingVector(entry["vector"])
                if vector.dimension != self.dimension:
                    raise EmbeddingError(
                        f"{self.path}: line {line_no} has dimension "
                        f"{vector.dimension}, expected {self.dimension}"
                    )
                self._entries[entry["key"]] = _CacheEntry(
                    vector=vector, truncated=bool(entry.get("truncated", False))
                )

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, key: str) -> Optional[_CacheEntry]:
        return self._entries.get(key)

    def put(self, key: str, vector: EmbeddingVector, truncated: bool = False) -> None:
        record = {"key": key, "vector": [float(x) for x in vector.values]}
        if truncated:
            record["truncated"] = True
        line = json.dumps(record) + "\n"
        with self._lock:
            if key in self._entries:
                return
            self._entries[key] = _CacheEntry(vector=vector, truncated=truncated)
            self._appender.write(line)
            self._appender.flush()

    def close(self) -> None:
        self._appender.close()

    def __enter__(self) -> "EmbeddingCache":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


@dataclass(frozen=True)
class TokenEmbeddings:
    """Per-token vectors for one text, with the tokens as served."""

    vectors: Tuple[EmbeddingVector, ...]
    tokens: Tuple[str, ...]
    truncated: bool


class EmbeddingProvider(abc.ABC):
    """Shared batching, caching, and accounting for embedding backends."""

    def __init__(
        self,
        model_id: str,
        dimension: int,
        max_tokens: int = DEFAULT_MAX_TOKENS,
        cache: "EmbeddingCache | InMemoryCache | None" = None,
    ) -> None:
        if max_tokens < 1:
            raise ValueError(f"max_tokens must be >= 1, got {max_tokens}")
        if cache is not None and cache.model_id != model_id:
            raise EmbeddingError(
                f"cache is bound to model {cache.model_id!r}, provider uses "
                f"{model_id!r}"
            )
        self.model_id = model_id
        self.dimension = dimension
        self.max_tokens = max_tokens
        self.cache = cache
        self._count = 0
        self._count_lock = threading.Lock()
        self._token_memo: Optional[Dict[str, TokenEmbeddings]] = (
            {} if cache is not None else None
        )

    @property
    def call_count(self) -> int:
        return self._count

    def _add_calls(self, n: int) -> None:
        with self._count_lock:
            self._count += n

    @abc.abstractmethod
    def _embed_batch(self, texts: List[str]) -> List[Tuple[EmbeddingVector, bool]]:
        """Embed normalized texts; return (vector, truncated) per text."""

    @abc.abstractmethod
    def _embed_token_batch(self, text: str) -> TokenEmbeddings:
        """Embed one normalized text in token mode."""

    def embed_texts_flagged(
        self, texts: Sequence[str]
    ) -> Tuple[List[EmbeddingVector], List[bool]]:
        """Embed texts; also return a truncation flag per text."""
        if not texts:
            return [], []
        normalized: List[str] = []
        for i, text in enumerate(texts):
            norm = normalize_text(text)
            if not norm:
                raise EmbeddingError(f"text {i} is empty or whitespace-only")
            normalized.append(norm)

        resolved: Dict[str, _CacheEntry] = {}
        order: List[str] = []
        for norm in normalized:
            if norm in resolved or norm in order:
                continue
            if self.cache is not None:
                hit = self.cache.get(cache_key(norm))
                if hit is not None:
                    resolved[norm] = hit
                    continue
            order.append(norm)

        if order:
            computed = self._embed_batch(list(order))
            if len(computed) != len(order):
                raise EmbeddingError(
                    f"backend returned {len(computed)} vectors for "
                    f"{len(order)} texts"
                )
            self._add_calls(len(order))
            for norm, (vector, truncated) in zip(order, computed):
                if vector.dimension != self.dimension:
                    index = normalized.index(norm)
                    raise EmbeddingError(
                        f"text {index}: backend returned dimension "
                        f"{vector.dimension}, expected {self.dimension}"
                    )
                entry = _CacheEntry(vector=vector, truncated=truncated)
                resolved[norm] = entry
                if self.cache is not None:
                    self.cache.put(cache_key(norm), vector, truncated)

        vectors = [resolved[n].vector for n in normalized]
        flags = [resolved[n].truncated for n in normalized]
        return vectors, flags

    def embed_texts(self, texts: Sequence[str]) -> List[EmbeddingVector]:
        vectors, _ = self.embed_texts_flagged(texts)
        return vectors

    def embed_tokens(self, text: str) -> TokenEmbeddings:
        """Embed one text in token mode (one backend call per uncached text)."""
        norm = normalize_text(text)
        if not norm:
            raise EmbeddingError("text 0 is empty or whitespace-only")
        if self._token_memo is not None and norm in self._token_memo:
            return self._token_memo[norm]
        result = self._embed_token_batch(norm)
        for vector in result.vectors:
            if vector.dimension != self.dimension:
                raise EmbeddingError(
                    f"backend returned token dimension {vector.dimension}, "
                    f"expected {self.dimension}"
                )
        self._add_calls(1)
        if self._token_memo is not None:
            self._token_memo[norm] = result
        return result


def _whitespace_truncate(text: str, limit: int) -> Tuple[str, bool]:
    parts = text.split()
    if len(parts) <= limit:
        return text, False
    return " ".join(parts[:limit]), True


class HashedProvider(EmbeddingProvider):
    """Deterministic hashed bag-of-words backend; needs no model or network."""

    def __init__(
        self,
        dimension: int = 256,
        model_id: Optional[str] = None,
        max_tokens: int = DEFAULT_MAX_TOKENS,
        cache=None,
    ) -> None:
        if dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {dimension}")
        super().__init__(
            model_id=model_id or f"hashed-{dimension}",
            dimension=dimension,
            max_tokens=max_tokens,
            cache=cache,
        )

    def _embed_batch(self, texts):
        out = []
        for text in texts:
            clipped, truncated = _whitespace_truncate(text, self.max_tokens)
            out.append((hashed_embedding(clipped, self.dimension), truncated))
        return out

    def _embed_token_batch(self, text: str) -> TokenEmbeddings:
        tokens = tokenize(text)
        if not len(tokens):
            raise EmbeddingError("text has no tokens after tokenization")
        kept, truncated = (
            (tokens.tokens[: self.max_tokens], True)
            if len(tokens) > self.max_tokens
            else (tokens.tokens, False)
        )
        vectors = tuple(hashed_embedding(tok, self.dimension) for tok in kept)
        return TokenEmbeddings(vectors=vectors, tokens=kept, truncated=truncated)


class VectorFileProvider(EmbeddingProvider):
    """Serves embeddings from a precomputed vector file; never computes."""

    def __init__(
        self,
        path: "str | Path",
        max_tokens: int = DEFAULT_MAX_TOKENS,
        cache=None,
    ) -> None:
        self.path = Path(path)
        with open(self.path, "r", encoding="utf-8") as fh:
            try:
                header = json.loads(fh.readline())
            except json.JSONDecodeError:
                raise EmbeddingError(f"{self.path}: vector file header is not valid JSON")
            for field in ("model_id", "dimension"):
                if field not in header:
                    raise EmbeddingError(f"{self.path}: header is missing {field!r}")
            self._store: Dict[str, _CacheEntry] = {}
            for line_no, line in enumerate(fh, start=2):
                if not line.strip():
                    continue
                try:
                    entry = json.loads(line)
                except json.JSONDecodeError:
                    raise EmbeddingError(f"{self.path}: line {line_no} is not valid JSON")
                if "key" not in entry or "vector" not in entry:
                    raise EmbeddingError(
                        f"{self.path}: line {line_no} needs 'key' and 'vector'"
                    )
                self._store[entry["key"]] = _CacheEntry(
                    vector=EmbeddingVector(entry["vector"]),
                    truncated=bool(entry.get("truncated", False)),
                )
        super().__init__(
            model_id=header["model_id"],
            dimension=int(header["dimension"]),
            max_tokens=max_tokens,
            cache=cache,
        )

    def _embed_batch(self, texts):
        out = []
        for text in texts:
            entry = self._store.get(cache_key(text))
            if entry is None:
                preview = text if len(text) <= 60 else text[:57] + "..."
                raise EmbeddingError(
                    f"vector file {self.path} has no entry for text {preview!r}"
                )
            if entry.vector.dimension != self.dimension:
                raise EmbeddingError(
                    f"vector file {self.path}: stored dimension "
                    f"{entry.vector.dimension} does not match header"
                )
            out.append((entry.vector, entry.truncated))
        return out

    def _embed_token_batch(self, text: str) -> TokenEmbeddings:
        tokens = tokenize(text)
        if not len(tokens):
            raise EmbeddingError("text has no tokens after tokenization")
        kept, truncated = (
            (tokens.tokens[: self.max_tokens], True)
            if len(tokens) > self.max_tokens
            else (tokens.tokens, False)
        )
        vectors = tuple(item[0] for item in self._embed_batch(list(kept)))
        return TokenEmbeddings(vectors=vectors, tokens=kept, truncated=truncated)


class HttpProvider(EmbeddingProvider):
    """Client for an embedding sidecar speaking POST /embed and GET /health.

    The service is the authority on tokenization and truncation; this client
    sends full texts and trusts the returned flags and token strings.
    """

    def __init__(
        self,
        endpoint: str,
        model_id: Optional[str] = None,
        cache=None,
        timeout: float = 60.0,
        batch_size: int = 64,
    ) -> None:
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self.batch_size = batch_size
        self._session = requests.Session()
        try:
            resp = self._session.get(f"{self.endpoint}/health", timeout=timeout)
        except requests.RequestException as exc:
            raise EmbeddingError(f"cannot reach embedding service: {exc}") from None
        if resp.status_code != 200:
            raise EmbeddingError(
                f"embedding service not ready (health returned {resp.status_code})"
            )
        health = resp.json()
        served_model = health.get("model_id")
        super().__init__(
            model_id=model_id or served_model,
            dimension=int(health["dimension"]),
            max_tokens=int(health.get("max_tokens", DEFAULT_MAX_TOKENS)),
            cache=cache,
        )

    def _post_embed(self, mode: str, texts: List[str]) -> dict:
        payload = {"model_id": self.model_id, "mode": mode, "texts": texts}
        try:
            resp = self._session.post(
                f"{self.endpoint}/embed", json=payload, timeout=self.timeout
            )
        except requests.RequestException as exc:
            raise EmbeddingError(f"embed request failed: {exc}") from None
        if resp.status_code != 200:
            try:
                detail = resp.json().get("detail", resp.text)
            except ValueError:
                detail = resp.text
            raise EmbeddingError(
                f"embed request failed with status {resp.status_code}: {detail}"
            )
        return resp.json()

    def _embed_batch(self, texts):
        out = []
        for start in range(0, len(texts), self.batch_size):
            chunk = texts[start : start + self.batch_size]
            data = self._post_embed("sentence", chunk)
            vectors = data["vectors"]
            flags = data.get("truncated") or [False] * len(chunk)
            if len(vectors) != len(chunk):
                raise EmbeddingError(
                    f"service returned {len(vectors)} vectors for {len(chunk)} texts"
                )
            out.extend(
                (EmbeddingVector(vec), bool(flag))
                for vec, flag in zip(vectors, flags)
            )
        return out

    def _embed_token_batch(self, text: str) -> TokenEmbeddings:
        data = self._post_embed("token", [text])
        vectors = tuple(EmbeddingVector(v) for v in data["token_vectors"][0])
        tokens = tuple(data["tokens"][0])
        flags = data.get("truncated") or [False]
        if not vectors:
            raise EmbeddingError("service returned no token vectors")
        return TokenEmbeddings(vectors=vectors, tokens=tokens, truncated=bool(flags[0]))


def build_provider(
    backend: str,
    *,
    dimension: int = 256,
    model_id: Optional[str] = None,
    endpoint: Optional[str] = None,
    cache_file: "str | Path | None" = None,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> EmbeddingProvider:
    """Construct a provider from CLI-style settings."""
    if backend == "hashed":
        resolved_model = model_id or f"hashed-{dimension}"
        cache = (
            EmbeddingCache(cache_file, model_id=resolved_model, dimension=dimension)
            if cache_file
            else None
        )
        return HashedProvider(
            dimension=dimension,
            model_id=resolved_model,
            max_tokens=max_tokens,
            cache=cache,
        )
    if backend == "cache":
        if not cache_file:
            raise EmbeddingError("the cache backend needs --cache-file")
        return VectorFileProvider(cache_file, max_tokens=max_tokens)
    if backend == "http":
        if not endpoint:
            raise EmbeddingError("the http backend needs --endpoint")
        provider = HttpProvider(endpoint, model_id=model_id)
        if cache_file:
            provider.cache = EmbeddingCache(
                cache_file, model_id=provider.model_id, dimension=provider.dimension
            )
            provider._token_memo = {}
        return provider
    raise EmbeddingError(f"unknown backend {backend!r}")
