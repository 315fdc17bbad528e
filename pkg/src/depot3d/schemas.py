"""Pydantic request/response models for the HTTP API.

Deposit drafts travel as plain JSON objects (their shape is owned by the
schema descriptor, not by static models), so draft payloads are typed as
dicts here; everything the server adds around them is modeled strictly.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class ReportEntryModel(BaseModel):
    path: str
    code: str
    message: str


class ReportModel(BaseModel):
    ok: bool
    errors: list[ReportEntryModel] = Field(default_factory=list)
    warnings: list[ReportEntryModel] = Field(default_factory=list)

    @classmethod
    def from_report(cls, report) -> "ReportModel":
        return cls(ok=report.ok,
                   errors=[ReportEntryModel(**e.to_dict()) for e in report.errors],
                   warnings=[ReportEntryModel(**w.to_dict()) for w in report.warnings])


class IssueModel(BaseModel):
    severity: str
    code: str
    message: str


class VerdictModel(BaseModel):
    format_class: str
    detected_format: str
    issues: list[IssueModel] = Field(default_factory=list)


class CreateDepositResponse(BaseModel):
    local_id: int
    version: int


class DepositEnvelope(BaseModel):
    local_id: int
    owner: str
    version: int
    deposit: dict
    pid_url: str | None = None
    report: ReportModel


class UpdateDepositRequest(BaseModel):
    deposit: dict
    expected_version: int | None = None


class UpdateDepositResponse(BaseModel):
    local_id: int
    version: int


class UploadResponse(BaseModel):
    document: dict
    verdict: VerdictModel
    version: int


class ExternalDocumentRequest(BaseModel):
    url: str
    expected_sha256: str | None = None
    media_role: str = "other"


class ExternalDocumentResponse(BaseModel):
    document: dict
    version: int


class PublishResponse(BaseModel):
    pid: str
    pid_url: str
    object_pids: list[str]


class NewVersionResponse(BaseModel):
    local_id: int


class SearchHit(BaseModel):
    local_id: int
    pid: str
    pid_url: str
    title: str
    access_policy: str
    object_count: int
    categories: list[str] = Field(default_factory=list)


class SearchResponse(BaseModel):
    total: int
    page: int
    page_size: int
    results: list[SearchHit]


class VocabEntryModel(BaseModel):
    scheme: str
    uri: str
    preferred_label: str
    alt_labels: list[str] = Field(default_factory=list)
    bounds: list[int] | None = None
    coords: list[float] | None = None


class VocabSearchResponse(BaseModel):
    scheme: str
    query: str
    results: list[VocabEntryModel]


class ServiceInfo(BaseModel):
    repo_id: str
    pid_prefix: str
    pid_namespace: str
    version: str


class ErrorBody(BaseModel):
    error: str
    message: str
    report: ReportModel | None = None
