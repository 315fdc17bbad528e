"""Domain value types for deposits, virtual objects and documents.

Everything here is a plain value: drafts are allowed to be incomplete or
ill-typed, so the loaders are deliberately lenient. A field that is absent
from a draft is None (or an empty list); a field whose JSON value cannot be
interpreted keeps the raw value so the validator can point at it instead of
this module throwing. Only structurally unreadable drafts (a list where an
object is required, etc.) raise DraftShapeError.

The dict form produced by deposit_to_dict is the canonical interchange
format shared by the CLI, the HTTP service and archive packages: one JSON
document per deposit, keys exactly the schema descriptor keys.
"""

from __future__ import annotations

import dataclasses
import datetime
from dataclasses import dataclass, field
from typing import Any

from ..errors import RepositoryError
from ..identifiers import PersistentIdentifier, parse as parse_pid, PidError

NATURE_OF_DEPOSIT_VALUES = ("digitisation", "restitution", "mixed")
ACCESS_POLICY_VALUES = ("public", "restricted")
STATUS_VALUES = ("draft", "published")
MEDIA_ROLE_VALUES = ("final-model", "source-scan", "texture", "image", "plan", "report", "other")
FORMAT_CLASS_VALUES = ("Archivable", "DepositOnly")
RELATION_KIND_VALUES = ("texture-of", "derived-from", "documents", "part-of")
STORAGE_KIND_VALUES = ("internal", "external", "file")

# Open enums: known values pass silently, unknown ones only warn.
KNOWN_NATURE_OF_RESOURCE = ("3D", "images", "texts", "mixed")
KNOWN_CATEGORIES = ("mesh", "point-cloud", "scene")

VOCAB_SCHEME_BY_FIELD = {
    "period_terms": "PeriodO",
    "place_terms": "Geonames",
    "subject_terms": "PACTOLS",
}


class DraftShapeError(RepositoryError):
    """The draft JSON is structurally unreadable (not merely incomplete)."""

    def __init__(self, message: str):
        super().__init__("DRAFT_UNREADABLE", message)


@dataclass
class Agent:
    name: str
    role_note: str | None = None
    org: str | None = None


@dataclass
class DateRange:
    min: Any = None  # int year once clean; raw value kept for the validator
    max: Any = None


# Archaeological ranges share the representation; negative years mean BCE.
ArchaeoDateRange = DateRange


@dataclass
class VocabularyRef:
    scheme: Any = None
    uri: Any = None
    label: Any = None


@dataclass
class StorageRef:
    """Where a document's bytes live.

    kind "internal": content-addressed blob key (SHA-256 hex) in the
    service's blob store. kind "external": absolute http(s) URL, no local
    copy. kind "file": a relative path — used by offline CLI drafts
    (relative to the draft file) and by archive packages (relative to the
    package root).
    """

    kind: Any = None
    ref: Any = None


@dataclass
class Relation:
    relation_kind: Any = None
    target: Any = None  # filename of another document in the same object


@dataclass
class DocumentRecord:
    filename: Any = None
    media_role: Any = None
    byte_size: Any = None
    checksum: Any = None
    format_class: Any = None
    storage: StorageRef | None = None
    relations: list[Relation] = field(default_factory=list)


@dataclass
class VirtualObject:
    local_id: Any = None
    pid: Any = None  # PersistentIdentifier | raw str | None
    title: Any = None
    creators: list[Agent] = field(default_factory=list)
    contributors: list[Agent] = field(default_factory=list)
    creation_3d_date: Any = None  # datetime.date | raw str | None
    archaeological_date: DateRange | None = None
    version: Any = None
    category: Any = None
    documents: list[DocumentRecord] = field(default_factory=list)
    final_model: Any = None  # filename of one of the documents


@dataclass
class Deposit:
    local_id: Any = None
    pid: Any = None
    title: Any = None
    deposit_creator: Agent | None = None
    silent_partners: list[Agent] = field(default_factory=list)
    nature_of_resource: Any = None
    nature_of_deposit: Any = None
    scientific_objectives: Any = None
    deposit_date: Any = None
    project_date_range: DateRange | None = None
    archaeological_date_range: DateRange | None = None
    period_terms: list[VocabularyRef] = field(default_factory=list)
    place_terms: list[VocabularyRef] = field(default_factory=list)
    subject_terms: list[VocabularyRef] = field(default_factory=list)
    citation: Any = None
    related_publications: list[Any] = field(default_factory=list)
    objects: list[VirtualObject] = field(default_factory=list)
    access_policy: Any = "public"
    status: Any = "draft"


def link_publication(d: Deposit, pub_id: str) -> Deposit:
    """Return a copy of the deposit with pub_id linked; idempotent."""
    if not isinstance(pub_id, str) or not pub_id.strip():
        raise RepositoryError("BAD_PUBLICATION_ID", "publication id must be non-empty")
    pub_id = pub_id.strip()
    if pub_id in d.related_publications:
        return d
    return dataclasses.replace(d, related_publications=[*d.related_publications, pub_id])


# ---------------------------------------------------------------------------
# Lenient loading from the JSON interchange form
# ---------------------------------------------------------------------------

def _as_int(v: Any) -> Any:
    if isinstance(v, bool):
        return v  # bool is an int subtype; kept raw so the validator flags it
    if v is None or isinstance(v, int):
        return v
    if isinstance(v, str):
        try:
            return int(v.strip())
        except ValueError:
            return v
    return v


def _as_text(v: Any) -> Any:
    if v is None or isinstance(v, str):
        return v
    return v


def _as_date(v: Any) -> Any:
    if v is None or isinstance(v, datetime.date):
        return v
    if isinstance(v, str):
        try:
            return datetime.date.fromisoformat(v)
        except ValueError:
            return v
    return v


def _as_pid(v: Any) -> Any:
    if v is None or isinstance(v, PersistentIdentifier):
        return v
    if isinstance(v, str) and v.strip():
        try:
            return parse_pid(v)
        except PidError:
            return v
    if isinstance(v, str):
        return None  # empty string means "no pid yet"
    return v


def _require_list(v: Any, path: str) -> list:
    if v is None:
        return []
    if not isinstance(v, list):
        raise DraftShapeError(f"{path} must be a JSON array")
    return v


def _require_dict(v: Any, path: str) -> dict:
    if not isinstance(v, dict):
        raise DraftShapeError(f"{path} must be a JSON object")
    return v


def _agent_from(v: Any, path: str) -> Agent:
    if isinstance(v, str):
        return Agent(name=v)
    d = _require_dict(v, path)
    return Agent(
        name=d.get("name") if isinstance(d.get("name"), str) else ("" if d.get("name") is None else str(d.get("name"))),
        role_note=_as_text(d.get("role_note")),
        org=_as_text(d.get("org")),
    )


def _agent_to(a: Agent) -> dict:
    return {"name": a.name, "role_note": a.role_note, "org": a.org}


def _range_from(v: Any, path: str) -> DateRange | None:
    if v is None:
        return None
    d = _require_dict(v, path)
    return DateRange(min=_as_int(d.get("min")), max=_as_int(d.get("max")))


def _range_to(r: DateRange | None) -> dict | None:
    if r is None:
        return None
    return {"min": r.min, "max": r.max}


def _vocab_ref_from(v: Any, path: str) -> VocabularyRef:
    d = _require_dict(v, path)
    return VocabularyRef(scheme=d.get("scheme"), uri=d.get("uri"), label=d.get("label"))


def _vocab_ref_to(r: VocabularyRef) -> dict:
    return {"scheme": r.scheme, "uri": r.uri, "label": r.label}


def _storage_from(v: Any, path: str) -> StorageRef | None:
    if v is None:
        return None
    d = _require_dict(v, path)
    kind = d.get("kind")
    # one ref slot per kind in the JSON form, for readability
    if kind == "internal":
        ref = d.get("blob_key", d.get("ref"))
    elif kind == "external":
        ref = d.get("url", d.get("ref"))
    elif kind == "file":
        ref = d.get("path", d.get("ref"))
    else:
        ref = d.get("ref")
    return StorageRef(kind=kind, ref=ref)


def _storage_to(s: StorageRef | None) -> dict | None:
    if s is None:
        return None
    key = {"internal": "blob_key", "external": "url", "file": "path"}.get(s.kind, "ref")
    return {"kind": s.kind, key: s.ref}


def _document_from(v: Any, path: str) -> DocumentRecord:
    d = _require_dict(v, path)
    relations = []
    for i, r in enumerate(_require_list(d.get("relations"), f"{path}.relations")):
        rd = _require_dict(r, f"{path}.relations.{i}")
        relations.append(Relation(relation_kind=rd.get("relation_kind"), target=rd.get("target")))
    return DocumentRecord(
        filename=_as_text(d.get("filename")),
        media_role=_as_text(d.get("media_role")),
        byte_size=_as_int(d.get("byte_size")),
        checksum=_as_text(d.get("checksum")),
        format_class=_as_text(d.get("format_class")),
        storage=_storage_from(d.get("storage"), f"{path}.storage"),
        relations=relations,
    )


def _document_to(doc: DocumentRecord) -> dict:
    return {
        "filename": doc.filename,
        "media_role": doc.media_role,
        "byte_size": doc.byte_size,
        "checksum": doc.checksum,
        "format_class": doc.format_class,
        "storage": _storage_to(doc.storage),
        "relations": [{"relation_kind": r.relation_kind, "target": r.target} for r in doc.relations],
    }


def _object_from(v: Any, path: str) -> VirtualObject:
    d = _require_dict(v, path)
    return VirtualObject(
        local_id=_as_int(d.get("local_id")),
        pid=_as_pid(d.get("pid")),
        title=_as_text(d.get("title")),
        creators=[_agent_from(a, f"{path}.creators.{i}")
                  for i, a in enumerate(_require_list(d.get("creators"), f"{path}.creators"))],
        contributors=[_agent_from(a, f"{path}.contributors.{i}")
                      for i, a in enumerate(_require_list(d.get("contributors"), f"{path}.contributors"))],
        creation_3d_date=_as_date(d.get("creation_3d_date")),
        archaeological_date=_range_from(d.get("archaeological_date"), f"{path}.archaeological_date"),
        version=_as_text(d.get("version")),
        category=_as_text(d.get("category")),
        documents=[_document_from(doc, f"{path}.documents.{i}")
                   for i, doc in enumerate(_require_list(d.get("documents"), f"{path}.documents"))],
        final_model=_as_text(d.get("final_model")),
    )


def _object_to(o: VirtualObject) -> dict:
    return {
        "local_id": o.local_id,
        "pid": o.pid.canonical() if isinstance(o.pid, PersistentIdentifier) else o.pid,
        "title": o.title,
        "creators": [_agent_to(a) for a in o.creators],
        "contributors": [_agent_to(a) for a in o.contributors],
        "creation_3d_date": o.creation_3d_date.isoformat()
        if isinstance(o.creation_3d_date, datetime.date) else o.creation_3d_date,
        "archaeological_date": _range_to(o.archaeological_date),
        "version": o.version,
        "category": o.category,
        "documents": [_document_to(doc) for doc in o.documents],
        "final_model": o.final_model,
    }


def document_to_dict(doc: DocumentRecord) -> dict:
    return _document_to(doc)


def deposit_from_dict(data: Any) -> Deposit:
    """Load a deposit draft from its JSON interchange form, leniently."""
    d = _require_dict(data, "deposit")
    return Deposit(
        local_id=_as_int(d.get("local_id")),
        pid=_as_pid(d.get("pid")),
        title=_as_text(d.get("title")),
        deposit_creator=None if d.get("deposit_creator") is None
        else _agent_from(d.get("deposit_creator"), "deposit_creator"),
        silent_partners=[_agent_from(a, f"silent_partners.{i}")
                         for i, a in enumerate(_require_list(d.get("silent_partners"), "silent_partners"))],
        nature_of_resource=_as_text(d.get("nature_of_resource")),
        nature_of_deposit=_as_text(d.get("nature_of_deposit")),
        scientific_objectives=_as_text(d.get("scientific_objectives")),
        deposit_date=_as_date(d.get("deposit_date")),
        project_date_range=_range_from(d.get("project_date_range"), "project_date_range"),
        archaeological_date_range=_range_from(d.get("archaeological_date_range"), "archaeological_date_range"),
        period_terms=[_vocab_ref_from(t, f"period_terms.{i}")
                      for i, t in enumerate(_require_list(d.get("period_terms"), "period_terms"))],
        place_terms=[_vocab_ref_from(t, f"place_terms.{i}")
                     for i, t in enumerate(_require_list(d.get("place_terms"), "place_terms"))],
        subject_terms=[_vocab_ref_from(t, f"subject_terms.{i}")
                       for i, t in enumerate(_require_list(d.get("subject_terms"), "subject_terms"))],
        citation=_as_text(d.get("citation")),
        related_publications=list(_require_list(d.get("related_publications"), "related_publications")),
        objects=[_object_from(o, f"objects.{i}")
                 for i, o in enumerate(_require_list(d.get("objects"), "objects"))],
        access_policy=d.get("access_policy", "public"),
        status=d.get("status", "draft"),
    )


def deposit_to_dict(d: Deposit) -> dict:
    """Serialize to the canonical interchange form (schema descriptor keys)."""
    return {
        "local_id": d.local_id,
        "pid": d.pid.canonical() if isinstance(d.pid, PersistentIdentifier) else d.pid,
        "title": d.title,
        "deposit_creator": None if d.deposit_creator is None else _agent_to(d.deposit_creator),
        "silent_partners": [_agent_to(a) for a in d.silent_partners],
        "nature_of_resource": d.nature_of_resource,
        "nature_of_deposit": d.nature_of_deposit,
        "scientific_objectives": d.scientific_objectives,
        "deposit_date": d.deposit_date.isoformat()
        if isinstance(d.deposit_date, datetime.date) else d.deposit_date,
        "project_date_range": _range_to(d.project_date_range),
        "archaeological_date_range": _range_to(d.archaeological_date_range),
        "period_terms": [_vocab_ref_to(t) for t in d.period_terms],
        "place_terms": [_vocab_ref_to(t) for t in d.place_terms],
        "subject_terms": [_vocab_ref_to(t) for t in d.subject_terms],
        "citation": d.citation,
        "related_publications": list(d.related_publications),
        "objects": [_object_to(o) for o in d.objects],
        "access_policy": d.access_policy,
        "status": d.status,
    }
