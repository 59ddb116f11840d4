"""HTTP API over the engine, mixer, extractor, and snapshot store.

Snapshots are immutable: every id resolves to the same FCM bytes forever,
and edits mint new snapshots. Errors come back as problem-detail JSON
records; 422 is reserved for convex-weight violations on /api/mix, while
malformed bodies are 400 and out-of-range edge weights are 409.
"""

from __future__ import annotations

import hashlib
import threading

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import engine
from .errors import (
    FcmError,
    FixtureError,
    InputError,
    PipelineError,
    ProviderError,
    ResourceError,
    SchemaError,
    ShapeError,
    UnsupportedError,
)
from .mixer import WEIGHT_SUM_TOLERANCE, MixSpec, mix
from .model import (
    CLAMPED_LINEAR,
    HARD_THRESHOLD,
    LOGISTIC,
    EdgeAnnotation,
    EdgeMatrix,
    Fcm,
    Provenance,
    Squasher,
    StateVector,
)
from .persistence import fcm_document, fcm_from_document, fcm_to_bytes

PROBLEM_CONTENT_TYPE = "application/problem+json"


class ProblemDetail(Exception):
    def __init__(self, status: int, title: str, detail: str, stage: str | None = None):
        super().__init__(detail)
        self.status = status
        self.title = title
        self.detail = detail
        self.stage = stage

    def response(self) -> JSONResponse:
        body = {
            "type": "about:blank",
            "title": self.title,
            "status": self.status,
            "detail": self.detail,
        }
        if self.stage:
            body["stage"] = self.stage
        return JSONResponse(body, status_code=self.status, media_type=PROBLEM_CONTENT_TYPE)


class SnapshotStore:
    """Append-only, content-addressed FCM store; ids never re-bind."""

    def __init__(self):
        self._lock = threading.Lock()
        self._by_id: dict[str, Fcm] = {}

    def put(self, fcm: Fcm) -> str:
        snapshot_id = hashlib.sha256(fcm_to_bytes(fcm)).hexdigest()
        with self._lock:
            self._by_id.setdefault(snapshot_id, fcm)
        return snapshot_id

    def get(self, snapshot_id: str) -> Fcm:
        with self._lock:
            fcm = self._by_id.get(snapshot_id)
        if fcm is None:
            raise ProblemDetail(404, "not found", f"no snapshot with id {snapshot_id!r}")
        return fcm

    def ids(self) -> list[str]:
        with self._lock:
            return list(self._by_id)


class PhiBody(BaseModel):
    kind: str = HARD_THRESHOLD
    threshold: float = 0.0
    steepness: float = 5.0


class TrajectoryBody(BaseModel):
    fcm_id: str
    init: list[float]
    phi: PhiBody = Field(default_factory=PhiBody)
    max_steps: int | None = None
    tolerance: float | None = None


class MixBody(BaseModel):
    fcm_ids: list[str]
    weights: list[float]


class EdgeBody(BaseModel):
    source: str
    target: str
    weight: float


class ExtractBody(BaseModel):
    text: str
    title: str | None = None


class FcmBody(BaseModel):
    model_config = {"extra": "allow"}


def _squasher_from_body(body: PhiBody) -> Squasher:
    if body.kind not in (HARD_THRESHOLD, LOGISTIC, CLAMPED_LINEAR):
        raise ProblemDetail(400, "invalid body", f"unknown squasher kind {body.kind!r}")
    try:
        return Squasher(kind=body.kind, threshold=body.threshold, steepness=body.steepness)
    except InputError as exc:
        raise ProblemDetail(400, "invalid body", str(exc)) from exc


def _classification_payload(classification) -> dict:
    return {
        "kind": classification.kind,
        "period": classification.period,
        "transient_length": classification.transient_length,
        "cycle_states": [list(state.values) for state in classification.cycle_states],
        "describe": classification.describe(),
    }


def create_app(provider=None, preload=None, ui_dir=None) -> FastAPI:
    """Build the API app.

    provider: optional LLM provider backing POST /api/extract.
    preload: optional iterable of Fcm objects registered at startup.
    ui_dir: optional directory of static UI assets served at /.
    """
    app = FastAPI(title="fcmkit", docs_url=None, redoc_url=None, openapi_url=None)
    store = SnapshotStore()
    app.state.store = store
    app.state.provider = provider

    for fcm in preload or ():
        store.put(fcm)

    @app.exception_handler(ProblemDetail)
    async def _problem_handler(_request: Request, exc: ProblemDetail):
        return exc.response()

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(_request: Request, exc: RequestValidationError):
        return ProblemDetail(400, "invalid body", str(exc.errors()[:3])).response()

    @app.get("/api/fcm")
    def list_fcms():
        entries = []
        for snapshot_id in store.ids():
            fcm = store.get(snapshot_id)
            entries.append(
                {"id": snapshot_id, "n": fcm.n, "edges": fcm.edges.nonzero_count(),
                 "labels": list(fcm.labels)}
            )
        return {"fcms": entries}

    @app.post("/api/fcm", status_code=201)
    def upload_fcm(body: FcmBody):
        try:
            fcm = fcm_from_document(body.model_dump())
        except (SchemaError, InputError, ShapeError) as exc:
            raise ProblemDetail(400, "invalid body", str(exc)) from exc
        return {"id": store.put(fcm)}

    @app.get("/api/fcm/{snapshot_id}")
    def get_fcm(snapshot_id: str):
        fcm = store.get(snapshot_id)
        return {"id": snapshot_id, "fcm": fcm_document(fcm)}

    @app.get("/api/provenance/{snapshot_id}")
    def get_provenance(snapshot_id: str):
        fcm = store.get(snapshot_id)
        return {
            "id": snapshot_id,
            "provenance": fcm_document(fcm)["provenance"],
            "reproducible": fcm.is_reproducible,
        }

    @app.post("/api/trajectory")
    def post_trajectory(body: TrajectoryBody):
        fcm = store.get(body.fcm_id)
        phi = _squasher_from_body(body.phi)
        try:
            init = StateVector(values=tuple(body.init))
            states, classification = engine.run_trajectory(
                fcm, init, phi, max_steps=body.max_steps, tolerance=body.tolerance
            )
        except (InputError, ShapeError, ResourceError) as exc:
            raise ProblemDetail(400, "invalid body", str(exc)) from exc
        return {
            "fcm_id": body.fcm_id,
            "labels": list(fcm.labels),
            "states": [list(state.values) for state in states],
            "classification": _classification_payload(classification),
        }

    @app.post("/api/mix", status_code=201)
    def post_mix(body: MixBody):
        if len(body.fcm_ids) != len(body.weights) or not body.fcm_ids:
            raise ProblemDetail(
                400, "invalid body", "fcm_ids and weights must be non-empty and equal length"
            )
        components = tuple(store.get(snapshot_id) for snapshot_id in body.fcm_ids)
        if any(w < 0 for w in body.weights) or abs(sum(body.weights) - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise ProblemDetail(
                422,
                "convexity violation",
                f"weights must be nonnegative and sum to 1, got {body.weights}",
            )
        try:
            mixed = mix(MixSpec(components=components, weights=tuple(body.weights)))
        except InputError as exc:
            raise ProblemDetail(400, "invalid body", str(exc)) from exc
        return {"id": store.put(mixed)}

    @app.patch("/api/fcm/{snapshot_id}/edge", status_code=201)
    def patch_edge(snapshot_id: str, body: EdgeBody):
        fcm = store.get(snapshot_id)
        ids = {node.id: i for i, node in enumerate(fcm.nodes)}
        if body.source not in ids or body.target not in ids:
            raise ProblemDetail(
                404, "not found", f"unknown node id in ({body.source!r}, {body.target!r})"
            )
        if not (-1.0 <= body.weight <= 1.0):
            raise ProblemDetail(
                409, "weight out of range", f"weight {body.weight} outside [-1, 1]"
            )
        matrix = np.array(fcm.edges.weights)
        matrix[ids[body.source], ids[body.target]] = body.weight
        annotations = {
            key: note
            for key, note in fcm.edge_annotations.items()
            if key != (body.source, body.target)
        }
        if body.weight != 0.0 and (body.source, body.target) in fcm.edge_annotations:
            annotations[(body.source, body.target)] = fcm.edge_annotations[
                (body.source, body.target)
            ]
        edited = Fcm(
            nodes=fcm.nodes,
            edges=EdgeMatrix(matrix),
            provenance=Provenance(
                source=f"edit of {snapshot_id}: {body.source}->{body.target} = {body.weight}",
                doc_id=fcm.provenance.doc_id,
                template_hashes=fcm.provenance.template_hashes,
                transcript_hash=fcm.provenance.transcript_hash,
            ),
            edge_annotations=annotations,
        )
        return {"id": store.put(edited)}

    @app.post("/api/extract", status_code=201)
    def post_extract(body: ExtractBody):
        if app.state.provider is None:
            raise ProblemDetail(503, "no provider", "extraction provider not configured")
        from .extraction.documents import document_from_text
        from .extraction.pipeline import extract_fcm

        if not body.text.strip():
            raise ProblemDetail(400, "invalid body", "text must be non-empty")
        doc = document_from_text(body.text, title=body.title)
        try:
            fcm, artifacts = extract_fcm(doc, app.state.provider)
        except PipelineError as exc:
            raise ProblemDetail(502, "extraction failed", str(exc), stage=exc.stage) from exc
        except (ProviderError, FixtureError) as exc:
            raise ProblemDetail(502, "provider failed", str(exc)) from exc
        return {
            "id": store.put(fcm),
            "doc_id": doc.doc_id,
            "artifacts": {
                "nouns": [
                    {
                        "surface": noun.surface,
                        "sentence_index": noun.sentence_index,
                        "resolved_from_pronoun": noun.resolved_from_pronoun,
                    }
                    for noun in artifacts.nouns
                ],
                "nodes": [
                    {"id": node.id, "label": node.label, "evidence": node.evidence}
                    for node in artifacts.nodes
                ],
                "accepted_edges": len(artifacts.accepted_edges),
                "rejected_edges": [
                    {
                        "source": edge.source_label,
                        "target": edge.target_label,
                        "reason": reason,
                    }
                    for edge, reason in artifacts.rejected_edges
                ],
            },
        }

    @app.exception_handler(FcmError)
    async def _fcm_error_handler(_request: Request, exc: FcmError):
        status = 400 if isinstance(exc, (InputError, ShapeError)) else 500
        if isinstance(exc, (UnsupportedError, ResourceError)):
            status = 400
        return ProblemDetail(status, type(exc).__name__, str(exc)).response()

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
