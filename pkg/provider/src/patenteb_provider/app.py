"""FastAPI service exposing the wire protocol: POST /embed, GET /info.

One in-process encoder instance; forward passes are serialized so request
interleaving can never affect results. Batching happens inside a single
request only.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .encoder import TransformerEncoder, encoder_from_spec

MAX_BATCH = 1024


class EmbedRequest(BaseModel):
    texts: list[str]
    layer_cap: int | None = None


def create_app(encoder: TransformerEncoder | None = None, model_spec: str | None = None) -> FastAPI:
    enc = encoder or encoder_from_spec(model_spec)
    lock = threading.Lock()
    app = FastAPI(title="patenteb reference provider")

    @app.get("/info")
    def info() -> dict:
        return enc.info()

    @app.post("/embed")
    def embed(request: EmbedRequest) -> dict:
        if not request.texts:
            raise HTTPException(status_code=400, detail="texts must be non-empty")
        if len(request.texts) > MAX_BATCH:
            raise HTTPException(status_code=413, detail=f"batch exceeds {MAX_BATCH} texts")
        cap = request.layer_cap
        if cap is not None and not 1 <= cap <= enc.n_layers:
            raise HTTPException(
                status_code=400, detail=f"layer_cap must lie in [1, {enc.n_layers}]"
            )
        with lock:
            vectors = enc.encode(request.texts, layer_cap=cap)
        return {
            "dim": enc.dim,
            "vectors": [[float(v) for v in row] for row in vectors],
            "normalized": True,
        }

    return app
