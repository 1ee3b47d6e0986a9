"""Read-only HTTP JSON API over the findings store: summary counts,
per-severity drill-down, per-collection detail."""

from __future__ import annotations

import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .model import severity_parse
from .store import StoreError

log = logging.getLogger(__name__)


def create_app(store) -> FastAPI:
    app = FastAPI(title="sentinel", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET"],
        allow_headers=["*"],
    )

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/api/summary")
    def summary():
        try:
            counts = store.summary()
        except StoreError as exc:
            return JSONResponse({"error": str(exc)}, status_code=500)
        return {
            "severity_counts": {s.value: n for s, n in counts.severity_counts.items() if n},
            "collections": {
                name: {s.value: n for s, n in per.items() if n}
                for name, per in counts.per_collection.items()
            },
        }

    @app.get("/api/vulnerabilities/{severity}")
    def vulnerabilities(severity: str):
        # Unparseable text maps to UNKNOWN rather than 400.
        sev = severity_parse(severity)
        try:
            rows = store.find_by_severity(sev)
        except StoreError as exc:
            return JSONResponse({"error": str(exc)}, status_code=500)
        return [{**finding.to_template(), "collection_name": name} for name, finding in rows]

    @app.get("/api/collections/{name}")
    def collection(name: str):
        try:
            findings = store.get_collection(name)
        except StoreError as exc:
            return JSONResponse({"error": str(exc)}, status_code=500)
        return [f.to_template() for f in findings]

    return app
