"""HTTP service exposing verification, extraction and generate-then-verify retrieval over one library index.

Requests run concurrently against an immutable index snapshot. Reloading replaces the whole snapshot in a single
reference swap: a request that already picked up the old snapshot finishes on it, and every later request sees the
new one.
"""
import contextlib
import json
import socket
import threading
from typing import List, Optional, Type, TypeVar

import httpx
import structlog
import uvicorn
from fastapi import Depends, FastAPI, Header, HTTPException, Request
from fastapi.concurrency import run_in_threadpool
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, ValidationError

from ddr.calc.dependency_index import DependencyIndex
from ddr.calc.extraction import extract_candidates, resolve_dependencies
from ddr.errors import BindError, GeneratorError, GeneratorTimeout, IndexLoadError
from ddr.knowledge.codecs import CODECS
from ddr.knowledge.index_file import load_index
from ddr.model import DependencyList, IndexInfo, MatchResult
from ddr.service.pipeline import VerifiedDependencies, prompt_payload, retrieve_dependencies
from ddr.service.settings import ServiceSettings

logger = structlog.get_logger(__name__)

_Body = TypeVar("_Body", bound=BaseModel)


class VerifyPayload(BaseModel):
    candidates: List[str]


class ExtractPayload(BaseModel):
    formal_code: str


class RetrievePayload(BaseModel):
    informal: str
    include_payload: bool = False


class IndexSnapshot:
    """Holds the current index; replace() swaps in a new one atomically with respect to readers."""

    def __init__(self, index: DependencyIndex):
        self._index = index
        self._lock = threading.Lock()

    @property
    def current(self) -> DependencyIndex:
        return self._index

    def replace(self, index: DependencyIndex) -> DependencyIndex:
        with self._lock:
            previous, self._index = self._index, index
        return previous


def _load(settings: ServiceSettings) -> DependencyIndex:
    try:
        return load_index(settings.index_path)
    except (OSError, ValueError) as e:
        raise IndexLoadError(f"Cannot load index {settings.index_path}: {e}") from e


async def _parse(request: Request, model: Type[_Body]) -> _Body:
    raw = await request.body()
    try:
        doc = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError):
        raise HTTPException(status_code=400, detail="Request body is not valid JSON") from None
    try:
        return model.model_validate(doc)
    except ValidationError as e:
        raise HTTPException(status_code=422, detail=json.loads(e.json(include_url=False))) from None


def create_app(settings: ServiceSettings,
               index: Optional[DependencyIndex] = None,
               client: Optional[httpx.Client] = None) -> FastAPI:
    """Builds the service application.

    Args:
        settings: Service settings.
        index: Index to serve. If omitted, it is loaded from settings.index_path.
        client: HTTP client for the generator. One is created (and closed on shutdown) if omitted.

    Raises:
        IndexLoadError if the index cannot be loaded.
    """
    snapshot = IndexSnapshot(index if index is not None else _load(settings))
    generator_slots = threading.BoundedSemaphore(settings.max_concurrency)
    http = client or httpx.Client()

    @contextlib.asynccontextmanager
    async def lifespan(_: FastAPI):
        yield
        if client is None:
            http.close()

    app = FastAPI(title="ddr dependency verification", lifespan=lifespan)
    app.state.snapshot = snapshot

    def require_token(authorization: Optional[str] = Header(None)):
        if settings.bearer_token and authorization != f"Bearer {settings.bearer_token}":
            raise HTTPException(status_code=401, detail="Unauthorized")

    guarded = [Depends(require_token)]

    @app.get("/v1/healthz", response_class=PlainTextResponse)
    def healthz():
        return "ok"

    @app.get("/v1/index/info", dependencies=guarded)
    def index_info():
        return CODECS[IndexInfo].encode(snapshot.current.info())

    @app.post("/v1/verify", dependencies=guarded)
    async def verify(request: Request):
        payload = await _parse(request, VerifyPayload)
        results = await run_in_threadpool(snapshot.current.verify_batch, payload.candidates)
        if results and all(r.error for r in results):
            raise HTTPException(status_code=422, detail=[{"query": r.query, "error": r.error} for r in results])
        return JSONResponse([CODECS[MatchResult].encode(r) for r in results])

    @app.post("/v1/extract", dependencies=guarded)
    async def extract(request: Request):
        payload = await _parse(request, ExtractPayload)
        index = snapshot.current
        cs = await run_in_threadpool(extract_candidates, payload.formal_code)
        dependencies = await run_in_threadpool(resolve_dependencies, index, cs)
        doc = {"candidates": list(cs.candidates)}
        doc.update(CODECS[DependencyList].encode(dependencies))
        return JSONResponse(doc)

    def _retrieve(informal: str) -> VerifiedDependencies:
        with generator_slots:
            return retrieve_dependencies(snapshot.current, settings.generator, informal, http)

    @app.post("/v1/retrieve", dependencies=guarded)
    async def retrieve(request: Request):
        payload = await _parse(request, RetrievePayload)
        if settings.generator is None:
            raise HTTPException(status_code=503, detail="No candidate generator configured")
        try:
            verified = await run_in_threadpool(_retrieve, payload.informal)
        except GeneratorTimeout as e:
            raise HTTPException(status_code=504, detail=str(e)) from None
        except GeneratorError as e:
            raise HTTPException(status_code=502, detail=str(e)) from None
        doc = CODECS[VerifiedDependencies].encode(verified)
        if payload.include_payload:
            doc["payload"] = prompt_payload(verified)
        return JSONResponse(doc)

    @app.post("/v1/admin/reload", dependencies=guarded)
    def reload():
        try:
            fresh = _load(settings)
        except IndexLoadError as e:
            logger.error("index reload failed", error=str(e))
            raise HTTPException(status_code=500, detail=str(e)) from None
        snapshot.replace(fresh)
        logger.info("index reloaded", items=len(fresh))
        return CODECS[IndexInfo].encode(fresh.info())

    return app


def _bind(host: str, port: int) -> socket.socket:
    family = socket.AF_INET6 if ":" in host else socket.AF_INET
    sock = socket.socket(family, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((host, port))
    except OSError as e:
        sock.close()
        raise BindError(f"Cannot bind {host}:{port}: {e}") from e
    return sock


def serve(settings: ServiceSettings):
    """Loads the index, binds the listening address and serves until interrupted.

    Raises:
        IndexLoadError if the index cannot be loaded; BindError if the address cannot be bound.
    """
    app = create_app(settings)
    sock = _bind(settings.host, settings.port)
    logger.info("serving", bind_addr=settings.bind_addr, items=len(app.state.snapshot.current))
    server = uvicorn.Server(uvicorn.Config(app, log_config=None))
    server.run(sockets=[sock])
