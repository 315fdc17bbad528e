"""FastAPI application wrapping the catalog store.

Authentication is a bearer token resolved against the config's token
table; requests without a token act with the public role. All catalog
mutations are serialized inside the store; handlers here are sync and run
in the threadpool, so a slow digest never blocks the event loop.
"""

from __future__ import annotations

import io
import tempfile
import zipfile
from pathlib import Path

import httpx
from fastapi import Depends, FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import __version__
from . import oai as oai_protocol
from .catalog import deposit_to_dict, schema_descriptor
from .catalog.model import document_to_dict
from .config import ServiceConfig
from .identifiers import PersistentIdentifier, resolve_url
from .package import PackageError, build_package
from .schemas import (
    CreateDepositResponse,
    DepositEnvelope,
    ErrorBody,
    ExternalDocumentRequest,
    ExternalDocumentResponse,
    NewVersionResponse,
    PublishResponse,
    ReportModel,
    SearchHit,
    SearchResponse,
    ServiceInfo,
    UpdateDepositRequest,
    UpdateDepositResponse,
    UploadResponse,
    VerdictModel,
    VocabEntryModel,
    VocabSearchResponse,
)
from .store import CatalogStore, ServiceError, StoredDeposit
from .vocab import VocabError


def default_fetcher(url: str) -> tuple[int, bytes | None]:
    response = httpx.head(url, follow_redirects=True, timeout=10.0)
    return response.status_code, None


def _token_from(request: Request) -> str | None:
    auth = request.headers.get("Authorization", "")
    if auth.startswith("Bearer "):
        return auth[len("Bearer "):].strip() or None
    return None


def create_app(config: ServiceConfig | None = None, store: CatalogStore | None = None,
               fetcher=None) -> FastAPI:
    config = config or ServiceConfig()
    store = store or CatalogStore(config)
    app = FastAPI(title="3D research data repository", version=__version__)
    app.state.store = store
    app.state.config = config
    app.state.fetcher = fetcher or default_fetcher

    def get_token(request: Request) -> str | None:
        return _token_from(request)

    @app.exception_handler(ServiceError)
    async def service_error_handler(_request: Request, exc: ServiceError):
        body = ErrorBody(error=exc.code, message=exc.message,
                         report=ReportModel.from_report(exc.report) if exc.report else None)
        return JSONResponse(status_code=exc.http_status,
                            content=body.model_dump(exclude_none=True))

    @app.exception_handler(VocabError)
    async def vocab_error_handler(_request: Request, exc: VocabError):
        status = 404 if exc.code in ("NOT_FOUND", "UNKNOWN_SCHEME") else 400
        return JSONResponse(status_code=status,
                            content=ErrorBody(error=exc.code, message=exc.message).model_dump(
                                exclude_none=True))

    def envelope(stored: StoredDeposit) -> DepositEnvelope:
        report = store.validation_report(stored.deposit.local_id)
        pid = stored.deposit.pid
        return DepositEnvelope(
            local_id=stored.deposit.local_id,
            owner=stored.owner,
            version=stored.version,
            deposit=deposit_to_dict(stored.deposit),
            pid_url=resolve_url(pid) if isinstance(pid, PersistentIdentifier) else None,
            report=ReportModel.from_report(report),
        )

    @app.get("/api/info", response_model=ServiceInfo)
    def info():
        return ServiceInfo(repo_id=config.repo_id, pid_prefix=config.pid_prefix,
                           pid_namespace=config.pid_namespace, version=__version__)

    @app.get("/api/schema")
    def get_schema():
        return schema_descriptor().to_dict()

    # -- deposit lifecycle ---------------------------------------------------

    @app.post("/api/deposits", response_model=CreateDepositResponse, status_code=201)
    def create_deposit(draft: dict, token: str | None = Depends(get_token)):
        local_id = store.create_deposit(token, draft)
        return CreateDepositResponse(local_id=local_id, version=1)

    @app.get("/api/deposits/{deposit_id}", response_model=DepositEnvelope)
    def get_deposit(deposit_id: int, token: str | None = Depends(get_token)):
        return envelope(store.get_deposit(token, deposit_id))

    @app.put("/api/deposits/{deposit_id}", response_model=UpdateDepositResponse)
    def update_deposit(deposit_id: int, body: UpdateDepositRequest,
                       token: str | None = Depends(get_token)):
        version = store.update_deposit(token, deposit_id, body.deposit, body.expected_version)
        return UpdateDepositResponse(local_id=deposit_id, version=version)

    @app.get("/api/deposits/{deposit_id}/report", response_model=ReportModel)
    def deposit_report(deposit_id: int, publishing: bool = False,
                       token: str | None = Depends(get_token)):
        store.get_deposit(token, deposit_id)
        return ReportModel.from_report(store.validation_report(deposit_id, publishing=publishing))

    @app.post("/api/validate", response_model=ReportModel)
    def validate_draft(draft: dict, publishing: bool = False):
        from .catalog import DraftShapeError, deposit_from_dict, validate_deposit
        try:
            deposit = deposit_from_dict(draft)
        except DraftShapeError as exc:
            raise ServiceError("VALIDATION", exc.message, 400)
        report = validate_deposit(deposit, vocab=store.vocab, publishing=publishing)
        return ReportModel.from_report(report)

    @app.post("/api/deposits/{deposit_id}/publish", response_model=PublishResponse)
    def publish(deposit_id: int, token: str | None = Depends(get_token)):
        pid, object_pids = store.publish(token, deposit_id)
        return PublishResponse(pid=pid.canonical(), pid_url=resolve_url(pid),
                               object_pids=[p.canonical() for p in object_pids])

    @app.post("/api/deposits/{deposit_id}/new-version", response_model=NewVersionResponse)
    def new_version(deposit_id: int, token: str | None = Depends(get_token)):
        return NewVersionResponse(local_id=store.new_version(token, deposit_id))

    @app.post("/api/deposits/{deposit_id}/check-links", response_model=ReportModel)
    def check_links(deposit_id: int, token: str | None = Depends(get_token)):
        store.get_deposit(token, deposit_id)
        return ReportModel.from_report(store.check_links(deposit_id, app.state.fetcher))

    # -- documents -------------------------------------------------------------

    @app.post("/api/deposits/{deposit_id}/objects/{object_id}/documents",
              response_model=UploadResponse, status_code=201)
    async def upload_document(deposit_id: int, object_id: int, request: Request,
                              filename: str = Query(...), media_role: str = Query("other"),
                              token: str | None = Depends(get_token)):
        data = await request.body()
        record, verdict = store.upload_document(token, deposit_id, object_id,
                                                filename, data, media_role)
        stored = store.get_deposit(token, deposit_id)
        return UploadResponse(document=document_to_dict(record),
                              verdict=VerdictModel(**verdict.to_dict()),
                              version=stored.version)

    @app.post("/api/deposits/{deposit_id}/objects/{object_id}/documents/external",
              response_model=ExternalDocumentResponse, status_code=201)
    def add_external_document(deposit_id: int, object_id: int, body: ExternalDocumentRequest,
                              token: str | None = Depends(get_token)):
        record = store.add_external_document(token, deposit_id, object_id,
                                             body.url, body.expected_sha256, body.media_role)
        stored = store.get_deposit(token, deposit_id)
        return ExternalDocumentResponse(document=document_to_dict(record), version=stored.version)

    @app.get("/api/deposits/{deposit_id}/objects/{object_id}/documents/{filename}")
    def download_document(deposit_id: int, object_id: int, filename: str,
                          token: str | None = Depends(get_token)):
        data = store.document_bytes(token, deposit_id, object_id, filename)
        return Response(content=data, media_type="application/octet-stream")

    @app.get("/api/deposits/{deposit_id}/objects/{object_id}/preview.ply")
    def preview(deposit_id: int, object_id: int, token: str | None = Depends(get_token)):
        data = store.preview_blob(token, deposit_id, object_id)
        headers = {"Content-Disposition": f'attachment; filename="{object_id}.preview.ply"'}
        return Response(content=data, media_type="application/octet-stream", headers=headers)

    # -- packages ----------------------------------------------------------------

    @app.get("/api/deposits/{deposit_id}/package")
    def package(deposit_id: int, token: str | None = Depends(get_token)):
        stored = store.get_deposit(token, deposit_id)
        source = store.file_source(stored.deposit)
        with tempfile.TemporaryDirectory() as tmp:
            out_dir = Path(tmp) / f"deposit-{deposit_id}"
            try:
                built = build_package(stored.deposit, source, out_dir)
            except PackageError as exc:
                raise ServiceError(exc.code, exc.message,
                                   422 if exc.code == "VALIDATION_FAILED" else 500,
                                   report=exc.report)
            buffer = io.BytesIO()
            with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as zf:
                for path in sorted(p for p in built.root.rglob("*") if p.is_file()):
                    zf.writestr(f"deposit-{deposit_id}/{path.relative_to(built.root).as_posix()}",
                                path.read_bytes())
        headers = {"Content-Disposition": f'attachment; filename="deposit-{deposit_id}-package.zip"'}
        return Response(content=buffer.getvalue(), media_type="application/zip", headers=headers)

    # -- search and vocabulary ------------------------------------------------------

    @app.get("/api/search", response_model=SearchResponse)
    def search(q: str = "", period: str = "", place: str = "", category: str = "",
               page: int = 1, page_size: int | None = Query(None, le=100),
               token: str | None = Depends(get_token)):
        size = page_size or config.search_page_size
        total, results = store.search(token, query=q, period=period, place=place,
                                      category=category, page=page, page_size=size)
        hits = []
        for stored in results:
            d = stored.deposit
            hits.append(SearchHit(
                local_id=d.local_id,
                pid=d.pid.canonical(),
                pid_url=resolve_url(d.pid),
                title=d.title or "",
                access_policy=d.access_policy,
                object_count=len(d.objects),
                categories=sorted({o.category for o in d.objects if isinstance(o.category, str)}),
            ))
        return SearchResponse(total=total, page=page, page_size=size, results=hits)

    @app.get("/api/vocab/{scheme}/search", response_model=VocabSearchResponse)
    def vocab_search(scheme: str, q: str = "", limit: int = Query(10, le=100)):
        results = store.vocab.search(scheme, q, limit)
        return VocabSearchResponse(scheme=scheme, query=q,
                                   results=[VocabEntryModel(**e.to_dict()) for e in results])

    @app.get("/api/vocab/{scheme}/resolve", response_model=VocabEntryModel)
    def vocab_resolve(scheme: str, uri: str):
        return VocabEntryModel(**store.vocab.resolve(scheme, uri).to_dict())

    # -- OAI-PMH -------------------------------------------------------------------

    @app.get("/oai")
    def oai_endpoint(request: Request):
        params = {k: v for k, v in request.query_params.items()}
        base_url = str(request.base_url).rstrip("/") + "/oai"
        xml = oai_protocol.handle(store, params, base_url)
        return Response(content=xml, media_type="text/xml")

    if config.ui_dir and Path(config.ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app


def load_app(config_path: str) -> FastAPI:
    """App factory for `uvicorn --factory` style launches."""
    return create_app(ServiceConfig.from_file(config_path))
