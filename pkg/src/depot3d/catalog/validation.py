"""Draft validation: every problem is a report entry, never an exception.

Error codes are stable API: MISSING, BAD_VALUE, BAD_CHECKSUM, BAD_SCHEME,
BAD_URL, RANGE_INVERTED, EMPTY_DEPOSIT, DUPLICATE_ID, DUPLICATE_FILENAME,
BAD_FINAL_MODEL, DANGLING_RELATION, TERM_UNRESOLVED. Warnings:
UNKNOWN_VALUE (open enums), SCHEME_UNVERIFIED (no fixture loaded for a
vocabulary scheme).
"""

from __future__ import annotations

import datetime
import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING
from urllib.parse import urlparse

from ..identifiers import PersistentIdentifier
from .model import (
    ACCESS_POLICY_VALUES,
    Agent,
    DateRange,
    Deposit,
    DocumentRecord,
    FORMAT_CLASS_VALUES,
    KNOWN_CATEGORIES,
    KNOWN_NATURE_OF_RESOURCE,
    MEDIA_ROLE_VALUES,
    NATURE_OF_DEPOSIT_VALUES,
    RELATION_KIND_VALUES,
    STATUS_VALUES,
    STORAGE_KIND_VALUES,
    VOCAB_SCHEME_BY_FIELD,
    VirtualObject,
    VocabularyRef,
)

if TYPE_CHECKING:  # pragma: no cover
    from ..vocab import VocabularyStore

_SHA256_RE = re.compile(r"^[0-9a-f]{64}$")


@dataclass(frozen=True)
class ReportEntry:
    path: str
    code: str
    message: str

    def to_dict(self) -> dict:
        return {"path": self.path, "code": self.code, "message": self.message}


@dataclass
class ValidationReport:
    errors: list[ReportEntry] = field(default_factory=list)
    warnings: list[ReportEntry] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {
            "errors": [e.to_dict() for e in self.errors],
            "warnings": [w.to_dict() for w in self.warnings],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ValidationReport":
        return cls(
            errors=[ReportEntry(**e) for e in d.get("errors", [])],
            warnings=[ReportEntry(**w) for w in d.get("warnings", [])],
        )


class _Collector:
    def __init__(self):
        self.errors: list[ReportEntry] = []
        self.warnings: list[ReportEntry] = []

    def error(self, path: str, code: str, message: str):
        self.errors.append(ReportEntry(path, code, message))

    def warn(self, path: str, code: str, message: str):
        self.warnings.append(ReportEntry(path, code, message))

    def report(self) -> ValidationReport:
        key = lambda e: (e.path, e.code, e.message)
        return ValidationReport(errors=sorted(self.errors, key=key),
                                warnings=sorted(self.warnings, key=key))


def _blank(v) -> bool:
    return v is None or (isinstance(v, str) and not v.strip())


def _check_text(r: _Collector, path: str, v, required: bool):
    if _blank(v):
        if required:
            r.error(path, "MISSING", "required field is missing or empty")
    elif not isinstance(v, str):
        r.error(path, "BAD_VALUE", f"expected text, got {type(v).__name__}")


def _check_positive_int(r: _Collector, path: str, v, required: bool):
    if v is None:
        if required:
            r.error(path, "MISSING", "required field is missing")
        return
    if isinstance(v, bool) or not isinstance(v, int):
        r.error(path, "BAD_VALUE", f"expected an integer, got {v!r}")
    elif v <= 0:
        r.error(path, "BAD_VALUE", f"must be positive, got {v}")


def _check_date(r: _Collector, path: str, v, required: bool):
    if v is None:
        if required:
            r.error(path, "MISSING", "required field is missing")
    elif not isinstance(v, datetime.date):
        r.error(path, "BAD_VALUE", f"not an ISO calendar date: {v!r}")


def _check_range(r: _Collector, path: str, rng: DateRange | None, required: bool):
    if rng is None:
        if required:
            r.error(path, "MISSING", "required field is missing")
        return
    bad = False
    for part, v in (("min", rng.min), ("max", rng.max)):
        if v is None:
            r.error(f"{path}.{part}", "MISSING", "year bound is missing")
            bad = True
        elif isinstance(v, bool) or not isinstance(v, int):
            r.error(f"{path}.{part}", "BAD_VALUE", f"expected an integer year, got {v!r}")
            bad = True
    if not bad and rng.min > rng.max:
        r.error(path, "RANGE_INVERTED", f"min {rng.min} is after max {rng.max}")


def _check_enum(r: _Collector, path: str, v, values: tuple[str, ...], required: bool,
                open_enum: bool = False):
    if _blank(v):
        if required:
            r.error(path, "MISSING", "required field is missing or empty")
        return
    if not isinstance(v, str):
        r.error(path, "BAD_VALUE", f"expected text, got {type(v).__name__}")
        return
    if v not in values:
        if open_enum:
            r.warn(path, "UNKNOWN_VALUE", f"{v!r} is not a known value ({', '.join(values)})")
        else:
            r.error(path, "BAD_VALUE", f"{v!r} not one of {', '.join(values)}")


def _check_agent(r: _Collector, path: str, a: Agent | None, required: bool):
    if a is None:
        if required:
            r.error(path, "MISSING", "required field is missing")
        return
    if _blank(a.name):
        r.error(f"{path}.name", "BAD_VALUE", "agent name must be non-empty")


def _is_absolute_uri(v) -> bool:
    if not isinstance(v, str) or not v.strip():
        return False
    return bool(urlparse(v).scheme)


def _check_vocab_ref(r: _Collector, path: str, ref: VocabularyRef, expected_scheme: str,
                     vocab: "VocabularyStore | None"):
    if ref.scheme != expected_scheme:
        r.error(f"{path}.scheme", "BAD_SCHEME",
                f"expected scheme {expected_scheme!r}, got {ref.scheme!r}")
    if not _is_absolute_uri(ref.uri):
        r.error(f"{path}.uri", "BAD_VALUE", f"not an absolute URI: {ref.uri!r}")
    elif vocab is not None and ref.scheme == expected_scheme:
        if not vocab.is_loaded(expected_scheme):
            r.warn(f"{path}.uri", "SCHEME_UNVERIFIED",
                   f"no {expected_scheme} fixture loaded; term not verified")
        elif not vocab.contains(expected_scheme, ref.uri):
            r.error(f"{path}.uri", "TERM_UNRESOLVED",
                    f"{ref.uri} not found in the loaded {expected_scheme} vocabulary")


def _check_pid(r: _Collector, path: str, v, expected_kind: str):
    if v is None:
        return
    if isinstance(v, PersistentIdentifier):
        if v.kind != expected_kind:
            r.error(path, "BAD_VALUE", f"identifier kind {v.kind!r}, expected {expected_kind!r}")
    else:
        r.error(path, "BAD_VALUE", f"not a parseable persistent identifier: {v!r}")


def _check_document(r: _Collector, path: str, doc: DocumentRecord, sibling_names: set):
    _check_text(r, f"{path}.filename", doc.filename, required=True)
    if isinstance(doc.filename, str) and doc.filename.strip():
        if "/" in doc.filename or "\\" in doc.filename or doc.filename in (".", ".."):
            r.error(f"{path}.filename", "BAD_VALUE", "filename must be a bare name")
    _check_enum(r, f"{path}.media_role", doc.media_role, MEDIA_ROLE_VALUES, required=True)
    if doc.byte_size is None:
        r.error(f"{path}.byte_size", "MISSING", "required field is missing")
    elif isinstance(doc.byte_size, bool) or not isinstance(doc.byte_size, int):
        r.error(f"{path}.byte_size", "BAD_VALUE", f"expected an integer, got {doc.byte_size!r}")
    elif doc.byte_size < 0:
        r.error(f"{path}.byte_size", "BAD_VALUE", "size cannot be negative")
    if _blank(doc.checksum):
        r.error(f"{path}.checksum", "MISSING", "required field is missing or empty")
    elif not isinstance(doc.checksum, str) or not _SHA256_RE.match(doc.checksum):
        r.error(f"{path}.checksum", "BAD_CHECKSUM",
                "checksum must be 64 lowercase hex characters")
    _check_enum(r, f"{path}.format_class", doc.format_class, FORMAT_CLASS_VALUES, required=True)
    if doc.storage is None:
        r.error(f"{path}.storage", "MISSING", "required field is missing")
    else:
        kind, ref = doc.storage.kind, doc.storage.ref
        if kind not in STORAGE_KIND_VALUES:
            r.error(f"{path}.storage", "BAD_VALUE",
                    f"storage kind must be one of {', '.join(STORAGE_KIND_VALUES)}")
        elif kind == "internal":
            if not isinstance(ref, str) or not _SHA256_RE.match(ref):
                r.error(f"{path}.storage", "BAD_VALUE", "internal storage needs a SHA-256 blob key")
        elif kind == "external":
            if not isinstance(ref, str) or urlparse(ref).scheme not in ("http", "https") \
                    or not urlparse(ref).netloc:
                r.error(f"{path}.storage", "BAD_URL", f"not an absolute http(s) URL: {ref!r}")
        elif kind == "file":
            if not isinstance(ref, str) or not ref.strip():
                r.error(f"{path}.storage", "BAD_VALUE", f"file storage needs a path, got {ref!r}")
    for k, rel in enumerate(doc.relations):
        rpath = f"{path}.relations.{k}"
        if rel.relation_kind not in RELATION_KIND_VALUES:
            r.error(f"{rpath}.relation_kind", "BAD_VALUE",
                    f"{rel.relation_kind!r} not one of {', '.join(RELATION_KIND_VALUES)}")
        if rel.target not in sibling_names:
            r.error(f"{rpath}.target", "DANGLING_RELATION",
                    f"no document named {rel.target!r} in this object")


def _check_object(r: _Collector, path: str, o: VirtualObject, published: bool,
                  vocab: "VocabularyStore | None"):
    _check_positive_int(r, f"{path}.local_id", o.local_id, required=True)
    _check_text(r, f"{path}.title", o.title, required=True)
    if not o.creators:
        r.error(f"{path}.creators", "MISSING", "at least one creator is required")
    for i, a in enumerate(o.creators):
        _check_agent(r, f"{path}.creators.{i}", a, required=True)
    for i, a in enumerate(o.contributors):
        _check_agent(r, f"{path}.contributors.{i}", a, required=True)
    _check_date(r, f"{path}.creation_3d_date", o.creation_3d_date, required=True)
    _check_range(r, f"{path}.archaeological_date", o.archaeological_date, required=True)
    _check_text(r, f"{path}.version", o.version, required=True)
    _check_enum(r, f"{path}.category", o.category, KNOWN_CATEGORIES, required=True, open_enum=True)
    _check_pid(r, f"{path}.pid", o.pid, "object")
    if published and o.pid is None:
        r.error(f"{path}.pid", "MISSING", "published deposits need an identifier per object")

    names = [d.filename for d in o.documents if isinstance(d.filename, str) and d.filename.strip()]
    name_set = set(names)
    seen = set()
    for j, doc in enumerate(o.documents):
        dpath = f"{path}.documents.{j}"
        if isinstance(doc.filename, str) and doc.filename in seen:
            r.error(f"{dpath}.filename", "DUPLICATE_FILENAME",
                    f"{doc.filename!r} appears more than once in this object")
        seen.add(doc.filename)
        _check_document(r, dpath, doc, name_set)
    if o.final_model is not None:
        target = next((d for d in o.documents if d.filename == o.final_model), None)
        if target is None:
            r.error(f"{path}.final_model", "BAD_FINAL_MODEL",
                    f"no document named {o.final_model!r} in this object")
        elif target.media_role != "final-model":
            r.error(f"{path}.final_model", "BAD_FINAL_MODEL",
                    f"{o.final_model!r} has media role {target.media_role!r}, expected 'final-model'")


def validate_deposit(d: Deposit, vocab: "VocabularyStore | None" = None,
                     publishing: bool = False) -> ValidationReport:
    """Validate a deposit draft; report entries are sorted by path.

    ``vocab``, when given, verifies vocabulary term URIs against the loaded
    fixtures. ``publishing`` applies the publish-time rules (non-empty
    object list) to a draft before any identifier has been minted; a
    deposit whose status is already "published" is held to the full rules
    including identifier presence.
    """
    r = _Collector()
    published = d.status == "published"

    _check_positive_int(r, "local_id", d.local_id, required=True)
    _check_text(r, "title", d.title, required=True)
    _check_agent(r, "deposit_creator", d.deposit_creator, required=True)
    for i, a in enumerate(d.silent_partners):
        _check_agent(r, f"silent_partners.{i}", a, required=True)
    _check_enum(r, "nature_of_resource", d.nature_of_resource, KNOWN_NATURE_OF_RESOURCE,
                required=True, open_enum=True)
    _check_enum(r, "nature_of_deposit", d.nature_of_deposit, NATURE_OF_DEPOSIT_VALUES, required=True)
    _check_text(r, "scientific_objectives", d.scientific_objectives, required=True)
    _check_date(r, "deposit_date", d.deposit_date, required=True)
    _check_range(r, "project_date_range", d.project_date_range, required=True)
    _check_range(r, "archaeological_date_range", d.archaeological_date_range, required=True)
    for key in ("period_terms", "place_terms", "subject_terms"):
        scheme = VOCAB_SCHEME_BY_FIELD[key]
        for i, ref in enumerate(getattr(d, key)):
            _check_vocab_ref(r, f"{key}.{i}", ref, scheme, vocab)
    _check_text(r, "citation", d.citation, required=True)
    for i, pub in enumerate(d.related_publications):
        if _blank(pub) or not isinstance(pub, str):
            r.error(f"related_publications.{i}", "BAD_VALUE",
                    "publication identifiers must be non-empty text")
    _check_enum(r, "access_policy", d.access_policy, ACCESS_POLICY_VALUES, required=False)
    _check_enum(r, "status", d.status, STATUS_VALUES, required=False)
    _check_pid(r, "pid", d.pid, "deposit")
    if published and d.pid is None:
        r.error("pid", "MISSING", "a published deposit must carry its identifier")

    if (published or publishing) and not d.objects:
        r.error("objects", "EMPTY_DEPOSIT",
                "a deposit is a collection of virtual objects; none attached")
    seen_ids = set()
    for i, o in enumerate(d.objects):
        opath = f"objects.{i}"
        if isinstance(o.local_id, int) and not isinstance(o.local_id, bool):
            if o.local_id in seen_ids:
                r.error(f"{opath}.local_id", "DUPLICATE_ID",
                        f"object id {o.local_id} appears more than once")
            seen_ids.add(o.local_id)
        _check_object(r, opath, o, published, vocab)

    return r.report()
