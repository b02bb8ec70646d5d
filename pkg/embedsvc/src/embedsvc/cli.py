"""Command line entry point: load the requested models, serve HTTP."""

from __future__ import annotations

import argparse
import functools
import os
from typing import Optional, Sequence

from .app import create_app
from .models import build_model


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embedsvc",
        description="Serve sentence/token text embeddings over HTTP",
    )
    parser.add_argument(
        "--model-id",
        action="append",
        help=(
            "model to serve: 'hashed', 'hashed-<dim>', 'token:<checkpoint>' "
            "or a sentence-transformers checkpoint id; repeat to serve "
            "several (first one is advertised by /health; default: "
            "%(default)s)"
        ),
        default=None,
    )
    parser.add_argument("--host", default=os.environ.get("EMBEDSVC_HOST", "127.0.0.1"))
    parser.add_argument(
        "--port", type=int, default=int(os.environ.get("EMBEDSVC_PORT", "8099"))
    )
    parser.add_argument(
        "--batch-cap", type=int, default=128,
        help="maximum texts per /embed request (default %(default)s)",
    )
    parser.add_argument(
        "--dim", type=int, default=256,
        help="dimension for a bare 'hashed' model id (default %(default)s)",
    )
    parser.add_argument(
        "--max-tokens", type=int, default=512,
        help="hashed-model truncation limit (default %(default)s)",
    )
    parser.add_argument(
        "--device", default=os.environ.get("EMBEDSVC_DEVICE"),
        help="torch device for checkpoint models (default: library choice)",
    )
    parser.add_argument("--log-level", default="info")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    specs = args.model_id or ["hashed"]
    # Lazy loaders: the server binds its port immediately and answers 503
    # while heavyweight checkpoints come up.
    loaders = [
        functools.partial(
            build_model,
            spec,
            dimension=args.dim,
            max_tokens=args.max_tokens,
            device=args.device,
        )
        for spec in specs
    ]
    app = create_app(loaders, batch_cap=args.batch_cap)

    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level=args.log_level)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
