"""embedsvc: an HTTP sidecar serving text embeddings.

Two endpoints — ``GET /health`` and ``POST /embed`` — backed by a
deterministic hashed model (always available) or transformer checkpoints
(optional ``models`` extra).
"""

from .app import create_app
from .models import (
    HashedModel,
    ModeUnsupported,
    SentenceTransformerModel,
    TokenTransformerModel,
    build_model,
)

__version__ = "0.1.0"

__all__ = [
    "HashedModel",
    "ModeUnsupported",
    "SentenceTransformerModel",
    "TokenTransformerModel",
    "build_model",
    "create_app",
    "__version__",
]
