"""HTTP facade over the evaluation engine.

Stateless-first: clients upload a model and a dataset once, get ids back,
and every evaluate/what-if/compare call names those ids. Uploads live in
memory and expire after an idle timeout; nothing else is stored. Every
response body is exactly what the corresponding library call renders, so
the service adds no scoring behaviour of its own.

Errors use one envelope: {"code": ..., "message": ..., "details": [...]}.
"""

from __future__ import annotations

import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import Body, FastAPI, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse

from .document import (
    DatasetError,
    ModelParseError,
    aggregation_from_obj,
    parse_dataset,
    parse_model,
    serialize_model,
)
from .engine import EvaluationError, WhatIfOverride, compare_methods, evaluate, what_if
from .render import canonical_json, comparison_to_obj, result_to_obj
from .validation import ModelValidationError, validate_model

DEFAULT_IDLE_TIMEOUT = 3600.0
TOKEN_ENV_VAR = "QMCDM_API_TOKEN"


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, details=()):
        self.status = status
        self.code = code
        self.message = message
        self.details = [str(d) for d in details]
        super().__init__(message)


@dataclass
class _Entry:
    value: Any
    text: str | None
    last_access: float


@dataclass
class _Store:
    """Uploaded models/datasets with idle expiry; guarded for concurrent
    request handlers."""

    ttl: float
    clock: Any = time.monotonic
    entries: dict[str, _Entry] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def put(self, value, text=None) -> str:
        key = uuid.uuid4().hex[:12]
        with self.lock:
            self._sweep()
            self.entries[key] = _Entry(value, text, self.clock())
        return key

    def get(self, key: str, kind: str) -> _Entry:
        with self.lock:
            self._sweep()
            entry = self.entries.get(key)
            if entry is None:
                raise ApiError(404, "not-found", f"unknown {kind} id {key!r}")
            entry.last_access = self.clock()
            return entry

    def _sweep(self):
        now = self.clock()
        for key in [k for k, e in self.entries.items()
                    if now - e.last_access > self.ttl]:
            del self.entries[key]


def _require(payload: dict, key: str) -> Any:
    if not isinstance(payload, dict) or key not in payload:
        raise ApiError(400, "bad-request", f"missing field {key!r}")
    return payload[key]


def create_app(idle_timeout: float = DEFAULT_IDLE_TIMEOUT, token: str | None = None,
               clock=time.monotonic, preload_model: str | Path | None = None,
               preload_data: str | Path | None = None,
               ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="qmcdm", docs_url=None, redoc_url=None)
    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")
    models = _Store(ttl=idle_timeout, clock=clock)
    datasets = _Store(ttl=idle_timeout, clock=clock)
    token = token if token is not None else os.environ.get(TOKEN_ENV_VAR)

    def _parse_and_validate(document: str):
        try:
            model = parse_model(document)
        except ModelParseError as exc:
            raise ApiError(400, "model-parse-error", str(exc)) from None
        issues = validate_model(model)
        if issues:
            raise ApiError(400, "model-invalid", "model failed validation",
                           details=issues)
        return model

    def _store_model(document: str) -> str:
        model = _parse_and_validate(document)
        return models.put(model, serialize_model(model))

    def _store_dataset(fmt: str, content, model=None) -> str:
        if fmt not in ("csv", "json"):
            raise ApiError(400, "bad-request", f"unknown dataset format {fmt!r}")
        if not isinstance(content, str):
            import json as _json

            content = _json.dumps(content)
        try:
            alternatives = parse_dataset(content, fmt, model=model)
        except DatasetError as exc:
            raise ApiError(400, "dataset-error", str(exc)) from None
        if not alternatives:
            raise ApiError(400, "dataset-error", "dataset holds no alternatives")
        return datasets.put(alternatives)

    if preload_model is not None:
        preloaded_model_id = _store_model(Path(preload_model).read_text(encoding="utf-8"))
        app.state.model_id = preloaded_model_id
        if preload_data is not None:
            path = Path(preload_data)
            fmt = "json" if path.suffix.lower() == ".json" else "csv"
            entry = models.get(preloaded_model_id, "model")
            app.state.dataset_id = _store_dataset(
                fmt, path.read_text(encoding="utf-8"), model=entry.value)

    @app.exception_handler(ApiError)
    async def _api_error(_req, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "message": exc.message,
                                     "details": exc.details})

    @app.middleware("http")
    async def _auth(request: Request, call_next):
        if token and request.url.path != "/healthz":
            supplied = request.headers.get("Authorization", "")
            if supplied != f"Bearer {token}":
                return JSONResponse(status_code=401,
                                    content={"code": "unauthorized",
                                             "message": "bearer token required",
                                             "details": []})
        return await call_next(request)

    def _canonical(obj) -> Response:
        return Response(content=canonical_json(obj), media_type="application/json")

    @app.get("/healthz", response_class=PlainTextResponse)
    async def healthz():
        return "ok"

    @app.get("/state")
    async def state():
        """Preloaded ids, if the server was started with --model/--data."""
        return {"modelId": getattr(app.state, "model_id", None),
                "datasetId": getattr(app.state, "dataset_id", None)}

    @app.post("/models")
    async def upload_model(payload: dict = Body(...)):
        document = _require(payload, "document")
        if not isinstance(document, str):
            raise ApiError(400, "bad-request", "'document' must be a string")
        return {"modelId": _store_model(document)}

    @app.get("/models/{model_id}")
    async def get_model(model_id: str):
        entry = models.get(model_id, "model")
        return PlainTextResponse(entry.text)

    @app.post("/datasets")
    async def upload_dataset(payload: dict = Body(...)):
        fmt = payload.get("format", "csv")
        content = _require(payload, "content")
        return {"datasetId": _store_dataset(fmt, content)}

    def _load_pair(payload: dict):
        model = models.get(_require(payload, "modelId"), "model").value
        alternatives = datasets.get(_require(payload, "datasetId"), "dataset").value
        return model, alternatives

    @app.post("/evaluate")
    async def evaluate_endpoint(payload: dict = Body(...)):
        model, alternatives = _load_pair(payload)
        method = payload.get("method")
        try:
            result = evaluate(model, alternatives, method=method)
        except ValueError as exc:
            raise ApiError(400, "bad-request", str(exc)) from None
        except ModelValidationError as exc:
            raise ApiError(400, "model-invalid", "model failed validation",
                           details=exc.issues) from None
        except EvaluationError as exc:
            raise ApiError(400, "evaluation-error", str(exc)) from None
        return _canonical(result_to_obj(result, method))

    @app.post("/whatif")
    async def whatif_endpoint(payload: dict = Body(...)):
        model, alternatives = _load_pair(payload)
        raw_overrides = _require(payload, "overrides")
        if not isinstance(raw_overrides, list):
            raise ApiError(400, "bad-request", "'overrides' must be a list")
        overrides = []
        for index, raw in enumerate(raw_overrides):
            if not isinstance(raw, dict) or "attributeId" not in raw:
                raise ApiError(400, "override-error",
                               f"override {index} needs attributeId and replacement")
            try:
                replacement = aggregation_from_obj(
                    _require(raw, "replacement"), path=f"overrides[{index}]")
            except ModelParseError as exc:
                raise ApiError(400, "override-error", str(exc)) from None
            overrides.append(WhatIfOverride(raw["attributeId"], replacement))
        try:
            result = what_if(model, overrides, alternatives)
        except ModelValidationError as exc:
            raise ApiError(400, "override-error", "override fails validation",
                           details=exc.issues) from None
        except EvaluationError as exc:
            raise ApiError(400, "override-error", str(exc)) from None
        return _canonical(result_to_obj(result))

    @app.post("/compare")
    async def compare_endpoint(payload: dict = Body(...)):
        model, alternatives = _load_pair(payload)
        methods = payload.get("methods") or ["roc", "rr", "rs", "swing"]
        try:
            comparison = compare_methods(model, alternatives, methods)
        except ValueError as exc:
            raise ApiError(400, "bad-request", str(exc)) from None
        except EvaluationError as exc:
            raise ApiError(400, "evaluation-error", str(exc)) from None
        return _canonical(comparison_to_obj(comparison))

    return app
