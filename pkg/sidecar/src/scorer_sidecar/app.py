"""FastAPI application exposing the scorer protocol.

POST /nli  {"premises": [...], "hypotheses": [...]} -> {"scores": [[...]]}
POST /ner  {"text": "..."}                          -> {"entities": [...]}
GET  /info                                          -> engine + model identifiers

Responses are positional and stateless: identical requests yield identical
responses for a fixed engine/model version.
"""

from __future__ import annotations

import os

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .engines import DEFAULT_NER_MODEL, DEFAULT_NLI_MODEL, EngineUnavailable, create_engine

DEFAULT_MAX_PAIRS = 4096


class NliRequest(BaseModel):
    premises: list[str] = Field(min_length=1)
    hypotheses: list[str] = Field(min_length=1)


class NliResponse(BaseModel):
    scores: list[list[float]]


class Entity(BaseModel):
    text: str
    start: int
    end: int
    label: str


class NerRequest(BaseModel):
    text: str = Field(min_length=1)


class NerResponse(BaseModel):
    entities: list[Entity]


def create_app(engine=None, max_pairs=None) -> FastAPI:
    """Build the service; engine and limits default from the environment.

    SIDECAR_ENGINE: auto | heuristic | transformers (default auto)
    SIDECAR_NLI_MODEL / SIDECAR_NER_MODEL: checkpoint identifiers
    SIDECAR_MAX_PAIRS: /nli batch cap as premises x hypotheses pairs
    """
    if max_pairs is None:
        max_pairs = int(os.environ.get("SIDECAR_MAX_PAIRS", DEFAULT_MAX_PAIRS))
    app = FastAPI(title="scorer-sidecar", version=__version__)
    app.state.engine = engine
    app.state.engine_error = None
    app.state.max_pairs = max_pairs

    def get_engine():
        if app.state.engine is None:
            if app.state.engine_error is not None:
                raise HTTPException(status_code=503, detail=app.state.engine_error)
            try:
                app.state.engine = create_engine(
                    kind=os.environ.get("SIDECAR_ENGINE", "auto"),
                    nli_model=os.environ.get("SIDECAR_NLI_MODEL", DEFAULT_NLI_MODEL),
                    ner_model=os.environ.get("SIDECAR_NER_MODEL", DEFAULT_NER_MODEL),
                )
            except EngineUnavailable as exc:
                app.state.engine_error = str(exc)
                raise HTTPException(status_code=503, detail=str(exc)) from exc
        return app.state.engine

    @app.post("/nli", response_model=NliResponse)
    def nli(request: NliRequest):
        n_pairs = len(request.premises) * len(request.hypotheses)
        if n_pairs > app.state.max_pairs:
            raise HTTPException(
                status_code=413,
                detail=f"batch of {n_pairs} pairs exceeds limit {app.state.max_pairs}",
            )
        scorer = get_engine()
        try:
            scores = scorer.nli(request.premises, request.hypotheses)
        except EngineUnavailable as exc:
            raise HTTPException(status_code=503, detail=str(exc)) from exc
        return NliResponse(scores=scores)

    @app.post("/ner", response_model=NerResponse)
    def ner(request: NerRequest):
        scorer = get_engine()
        try:
            entities = scorer.ner(request.text)
        except EngineUnavailable as exc:
            raise HTTPException(status_code=503, detail=str(exc)) from exc
        return NerResponse(entities=entities)

    @app.get("/info")
    def info():
        scorer = get_engine()
        return {
            "service": "scorer-sidecar",
            "version": __version__,
            "engine": scorer.name,
            "models": {"nli": scorer.nli_model, "ner": scorer.ner_model},
            "max_pairs": app.state.max_pairs,
        }

    return app
