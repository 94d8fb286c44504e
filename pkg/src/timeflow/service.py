"""HTTP/JSON API over the pipeline and repository.

All bodies use the interchange format; version tags travel as ETag /
If-Match headers. Mutating endpoints go through the store's
compare-and-swap, so concurrent clients get 409 instead of lost updates.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Header, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from . import interchange, pipeline, store
from .chronology import detect_gaps
from .ingest import CorpusError, load_manifest
from .layout import LayoutOptions, compute_layout
from .model import ChronologyError, apply_perspective, merge_events, validate
from .render import default_style, render_svg, render_view_json


def _slug(name: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-") or "corpus"


def create_app(repository: store.Repository) -> FastAPI:
    app = FastAPI(title="timeflow", version="0.1.0")

    @app.exception_handler(store.NotFoundError)
    async def not_found(request: Request, exc: store.NotFoundError):
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(store.ConflictError)
    async def conflict(request: Request, exc: store.ConflictError):
        return JSONResponse(status_code=409, content={"error": str(exc)})

    @app.exception_handler(ChronologyError)
    async def invalid(request: Request, exc: ChronologyError):
        return JSONResponse(status_code=422, content={"error": str(exc)})

    @app.exception_handler(CorpusError)
    async def corpus_error(request: Request, exc: CorpusError):
        return JSONResponse(status_code=422, content={"error": str(exc)})

    @app.post("/corpora")
    async def create_corpus(body: dict):
        if "path" in body:
            manifest_path = Path(body["path"]).resolve()
            manifest = load_manifest(manifest_path)  # validates up front
            record = {"path": str(manifest_path), "name": manifest.name}
        else:
            return JSONResponse(
                status_code=422, content={"error": "body must carry a manifest 'path'"}
            )
        corpus_id = body.get("id") or _slug(record["name"])
        tag = repository.save("corpora", corpus_id, record)
        return JSONResponse(
            status_code=201,
            content={"id": corpus_id},
            headers={"ETag": tag},
        )

    @app.get("/corpora")
    async def list_corpora():
        return {"corpora": repository.list("corpora")}

    @app.post("/corpora/{corpus_id}/extract")
    async def extract_corpus(corpus_id: str):
        record, _ = repository.load("corpora", corpus_id)
        manifest = load_manifest(Path(record["path"]))
        result = pipeline.run_pipeline(manifest, name=corpus_id)
        document = interchange.chronology_to_dict(result.chronology)
        tag = repository.save("chronologies", corpus_id, document)
        return JSONResponse(
            status_code=201,
            content={
                "chronology_id": corpus_id,
                "events": len(result.chronology.events()),
                "relations": len(result.chronology.relations),
                "warnings": result.warnings,
            },
            headers={"ETag": tag},
        )

    @app.get("/chronologies")
    async def list_chronologies():
        return {"chronologies": repository.list("chronologies")}

    @app.get("/chronologies/{chronology_id}")
    async def get_chronology(chronology_id: str):
        document, tag = repository.load("chronologies", chronology_id)
        return JSONResponse(content=document, headers={"ETag": tag})

    @app.put("/chronologies/{chronology_id}")
    async def put_chronology(
        chronology_id: str, body: dict, if_match: Optional[str] = Header(default=None)
    ):
        chronology = interchange.chronology_from_dict(body)
        violations = validate(chronology)
        if violations:
            return JSONResponse(
                status_code=422,
                content={"violations": [
                    {"element": v.element, "rule": v.rule, "message": v.message}
                    for v in violations
                ]},
            )
        tag = repository.save(
            "chronologies", chronology_id, body, expected_tag=if_match
        )
        return JSONResponse(content={"chronology_id": chronology_id}, headers={"ETag": tag})

    @app.post("/perspectives")
    async def create_perspective(body: dict):
        perspective = interchange.perspective_from_dict(body)  # shape check
        tag = repository.save("perspectives", _slug(perspective.name), body)
        return JSONResponse(
            status_code=201,
            content={"id": _slug(perspective.name)},
            headers={"ETag": tag},
        )

    @app.get("/perspectives")
    async def list_perspectives():
        return {"perspectives": repository.list("perspectives")}

    @app.get("/perspectives/{perspective_id}")
    async def get_perspective(perspective_id: str):
        document, tag = repository.load("perspectives", perspective_id)
        return JSONResponse(content=document, headers={"ETag": tag})

    @app.get("/chronologies/{chronology_id}/timeflow")
    async def timeflow(
        chronology_id: str,
        perspective: Optional[str] = None,
        format: str = "json",
        spacing: str = "uniform",
    ):
        document, tag = repository.load("chronologies", chronology_id)
        view = interchange.chronology_from_dict(document)
        if perspective:
            raw, _ = repository.load("perspectives", perspective)
            view = apply_perspective(view, interchange.perspective_from_dict(raw))
        layout = compute_layout(view, LayoutOptions(spacing=spacing))
        style = default_style()
        if format == "svg":
            return PlainTextResponse(
                render_svg(layout, view, style),
                media_type="image/svg+xml",
                headers={"ETag": tag},
            )
        return JSONResponse(content=render_view_json(layout, view, style), headers={"ETag": tag})

    @app.post("/chronologies/{chronology_id}/merge")
    async def merge(
        chronology_id: str, body: dict, if_match: Optional[str] = Header(default=None)
    ):
        document, tag = repository.load("chronologies", chronology_id)
        chronology = interchange.chronology_from_dict(document)
        merged = merge_events(chronology, body["event_ids"])
        new_tag = repository.save(
            "chronologies",
            chronology_id,
            interchange.chronology_to_dict(merged),
            expected_tag=if_match if if_match is not None else tag,
        )
        return JSONResponse(
            content={"chronology_id": chronology_id, "previous_tag": tag},
            headers={"ETag": new_tag},
        )

    @app.get("/chronologies/{chronology_id}/gaps")
    async def gaps(chronology_id: str, min_days: int = 365):
        document, _ = repository.load("chronologies", chronology_id)
        chronology = interchange.chronology_from_dict(document)
        found = detect_gaps(chronology, min_days)
        return {"gaps": [interchange.interval_to_dict(g) for g in found]}

    ui_dir = Path(__file__).parent.parent.parent.parent / "frontend" / "dist"
    if ui_dir.is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
