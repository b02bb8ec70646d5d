"""FastAPI application factory for the embedding service.

Request handling is stateless over an immutable registry of loaded models,
so concurrent requests are safe. Model loading happens inside the lifespan
hook: until it finishes, every route answers 503 rather than blocking.

Error contract: 400 malformed request or unsupported/empty input, 404
unknown model id, 413 batch over the configured cap, 503 still loading.
"""

from __future__ import annotations

import math
from contextlib import asynccontextmanager
from typing import Callable, List, Literal, Sequence, Union

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .models import SENTENCE, ModeUnsupported

ModelOrLoader = Union[object, Callable[[], object]]


class EmbedRequest(BaseModel):
    model_id: str
    mode: Literal["sentence", "token"]
    texts: List[str] = Field(min_length=1)


def _all_finite(rows) -> bool:
    for row in rows:
        for value in row:
            if not math.isfinite(value):
                return False
    return True


def create_app(
    models: Sequence[ModelOrLoader],
    batch_cap: int = 128,
) -> FastAPI:
    """Build the service around one or more models (or lazy loaders).

    The first model is the one `/health` advertises; requests address any
    registered model by id.
    """
    if not models:
        raise ValueError("at least one model (or loader) is required")
    if batch_cap < 1:
        raise ValueError(f"batch_cap must be >= 1, got {batch_cap}")

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        loaded = [m() if callable(m) else m for m in app.state.pending]
        app.state.registry = {m.model_id: m for m in loaded}
        app.state.default_id = loaded[0].model_id
        app.state.ready = True
        yield

    app = FastAPI(lifespan=lifespan)
    app.state.pending = list(models)
    app.state.registry = {}
    app.state.default_id = None
    app.state.ready = False
    app.state.batch_cap = batch_cap

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
            for err in exc.errors()
        )
        return JSONResponse(status_code=400, content={"detail": problems})

    def _require_ready(request: Request) -> None:
        if not request.app.state.ready:
            raise HTTPException(status_code=503, detail="model loading")

    @app.get("/health")
    async def health(request: Request):
        _require_ready(request)
        state = request.app.state
        model = state.registry[state.default_id]
        return {
            "status": "ok",
            "model_id": model.model_id,
            "dimension": model.dimension,
            "max_tokens": model.max_tokens,
            "mode_support": sorted(model.modes),
        }

    @app.post("/embed")
    async def embed(body: EmbedRequest, request: Request):
        _require_ready(request)
        state = request.app.state
        if len(body.texts) > state.batch_cap:
            raise HTTPException(
                status_code=413,
                detail=(
                    f"batch of {len(body.texts)} texts exceeds the cap of "
                    f"{state.batch_cap}"
                ),
            )
        model = state.registry.get(body.model_id)
        if model is None:
            raise HTTPException(
                status_code=404,
                detail=f"unknown model id {body.model_id!r}",
            )
        if body.mode not in model.modes:
            raise HTTPException(
                status_code=400,
                detail=f"model {model.model_id!r} does not serve {body.mode} mode",
            )
        try:
            if body.mode == SENTENCE:
                vectors, truncated = model.embed_sentences(body.texts)
                payload = {
                    "model_id": model.model_id,
                    "dimension": model.dimension,
                    "vectors": vectors,
                    "truncated": truncated,
                }
                finite = _all_finite(vectors)
            else:
                token_vecs, tokens, truncated = model.embed_tokens(body.texts)
                payload = {
                    "model_id": model.model_id,
                    "dimension": model.dimension,
                    "token_vectors": token_vecs,
                    "tokens": tokens,
                    "truncated": truncated,
                }
                finite = all(_all_finite(per_text) for per_text in token_vecs)
        except ModeUnsupported as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        if not finite:
            raise HTTPException(
                status_code=500, detail="model produced non-finite values"
            )
        return payload

    return app
