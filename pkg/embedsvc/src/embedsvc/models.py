"""Embedding model wrappers served over the wire.

Every model exposes the same small surface: identity (``model_id``,
``dimension``, ``max_tokens``, supported ``modes``) plus ``embed_sentences``
and ``embed_tokens``. The hashed model is pure python/numpy and always
available; the transformer wrappers import their heavyweight dependencies
lazily so the service runs without them installed.
"""

from __future__ import annotations

import re
from typing import List, Sequence, Tuple

from .hashing import canonical, sentence_vector, token_vectors

SENTENCE = "sentence"
TOKEN = "token"

SentenceBatch = Tuple[List[List[float]], List[bool]]
TokenBatch = Tuple[List[List[List[float]]], List[List[str]], List[bool]]


class ModeUnsupported(Exception):
    """Raised when a model is asked for a mode it does not serve."""


class HashedModel:
    """Deterministic hashed embeddings; serves both modes, loads instantly."""

    def __init__(
        self,
        dimension: int = 256,
        model_id: "str | None" = None,
        max_tokens: int = 512,
    ) -> None:
        if dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {dimension}")
        if max_tokens < 1:
            raise ValueError(f"max_tokens must be >= 1, got {max_tokens}")
        self.dimension = dimension
        self.max_tokens = max_tokens
        self.model_id = model_id or f"hashed-{dimension}"
        self.modes = frozenset({SENTENCE, TOKEN})

    def embed_sentences(self, texts: Sequence[str]) -> SentenceBatch:
        vectors: List[List[float]] = []
        flags: List[bool] = []
        for text in texts:
            vec, truncated = sentence_vector(
                canonical(text), self.dimension, self.max_tokens
            )
            vectors.append(vec.tolist())
            flags.append(truncated)
        return vectors, flags

    def embed_tokens(self, texts: Sequence[str]) -> TokenBatch:
        all_vectors: List[List[List[float]]] = []
        all_tokens: List[List[str]] = []
        flags: List[bool] = []
        for text in texts:
            vecs, tokens, truncated = token_vectors(
                canonical(text), self.dimension, self.max_tokens
            )
            all_vectors.append([v.tolist() for v in vecs])
            all_tokens.append(list(tokens))
            flags.append(truncated)
        return all_vectors, all_tokens, flags


class SentenceTransformerModel:
    """Pooled sentence vectors from a sentence-transformers checkpoint.

    Uses the checkpoint's own default pooling; vectors are returned as-is
    (cosine downstream makes scale irrelevant).
    """

    def __init__(self, model_id: str, device: "str | None" = None) -> None:
        from sentence_transformers import SentenceTransformer

        self._model = SentenceTransformer(model_id, device=device)
        self.model_id = model_id
        self.dimension = int(self._model.get_sentence_embedding_dimension())
        self.max_tokens = int(getattr(self._model, "max_seq_length", 512))
        self.modes = frozenset({SENTENCE})

    def _token_count(self, text: str) -> int:
        encoded = self._model.tokenizer(text, truncation=False)
        return len(encoded["input_ids"])

    def embed_sentences(self, texts: Sequence[str]) -> SentenceBatch:
        import numpy as np

        raw = self._model.encode(
            list(texts),
            convert_to_numpy=True,
            batch_size=32,
            show_progress_bar=False,
        )
        vectors = [row.astype(np.float64).tolist() for row in np.asarray(raw)]
        flags = [self._token_count(t) > self.max_tokens for t in texts]
        return vectors, flags

    def embed_tokens(self, texts: Sequence[str]) -> TokenBatch:
        raise ModeUnsupported(f"{self.model_id} serves sentence mode only")


class TokenTransformerModel:
    """Last-hidden-state token vectors from a masked-LM encoder checkpoint.

    Returns the checkpoint tokenizer's own subword strings (special tokens
    dropped) so the client can align vectors to text without guessing the
    tokenization.
    """

    def __init__(self, model_id: str, device: "str | None" = None) -> None:
        import torch
        from transformers import AutoModel, AutoTokenizer

        self._torch = torch
        self._tokenizer = AutoTokenizer.from_pretrained(model_id)
        self._model = AutoModel.from_pretrained(model_id)
        self._model.eval()
        self._device = device or "cpu"
        self._model.to(self._device)
        self.model_id = model_id
        self.dimension = int(self._model.config.hidden_size)
        limit = int(self._tokenizer.model_max_length)
        # Some tokenizers report a sentinel "no limit" value.
        self.max_tokens = limit if 0 < limit <= 100_000 else 512
        self.modes = frozenset({TOKEN})

    def embed_sentences(self, texts: Sequence[str]) -> SentenceBatch:
        raise ModeUnsupported(f"{self.model_id} serves token mode only")

    def embed_tokens(self, texts: Sequence[str]) -> TokenBatch:
        all_vectors: List[List[List[float]]] = []
        all_tokens: List[List[str]] = []
        flags: List[bool] = []
        for text in texts:
            full = self._tokenizer(text, truncation=False)["input_ids"]
            encoded = self._tokenizer(
                text,
                truncation=True,
                max_length=self.max_tokens,
                return_tensors="pt",
                return_special_tokens_mask=True,
            )
            special = encoded.pop("special_tokens_mask")[0].bool()
            encoded = {k: v.to(self._device) for k, v in encoded.items()}
            with self._torch.no_grad():
                hidden = self._model(**encoded).last_hidden_state[0]
            keep = ~special
            ids = encoded["input_ids"][0][keep]
            if ids.numel() == 0:
                raise ValueError("text has no tokens after tokenization")
            vectors = hidden[keep].cpu().double().numpy()
            tokens = self._tokenizer.convert_ids_to_tokens(ids.cpu().tolist())
            all_vectors.append([row.tolist() for row in vectors])
            all_tokens.append(list(tokens))
            flags.append(len(full) > self.max_tokens)
        return all_vectors, all_tokens, flags


_HASHED_ID = re.compile(r"^hashed(?:-(\d+))?$")


def build_model(
    spec: str,
    *,
    dimension: int = 256,
    max_tokens: int = 512,
    device: "str | None" = None,
):
    """Resolve a model spec string to a loaded model.

    ``hashed`` / ``hashed-<dim>`` build the offline backend; ``token:<id>``
    loads a token-vector encoder checkpoint; anything else is treated as a
    sentence-transformers checkpoint id.
    """
    match = _HASHED_ID.match(spec)
    if match:
        dim = int(match.group(1)) if match.group(1) else dimension
        return HashedModel(dimension=dim, max_tokens=max_tokens)
    if spec.startswith("token:"):
        return TokenTransformerModel(spec[len("token:"):], device=device)
    return SentenceTransformerModel(spec, device=device)
