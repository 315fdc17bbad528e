"""Catalog store: deposit lifecycle, blob storage, search and rights.

Persistence is a single append-friendly journal (one JSON event per line)
plus a content-addressed blob directory; the whole state is replayed into
memory at startup. All mutations funnel through one lock (single writer);
reads are lock-free on immutable snapshots. Blob writes are idempotent,
keyed by the SHA-256 of the content.
"""

from __future__ import annotations

import datetime
import hashlib
import json
import re
import threading
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .catalog import (
    Deposit,
    DocumentRecord,
    DraftShapeError,
    StorageRef,
    ValidationReport,
    deposit_from_dict,
    deposit_to_dict,
    validate_deposit,
)
from .catalog.validation import ReportEntry
from .config import ServiceConfig, role_rank
from .errors import RepositoryError
from .formats import classify, decimate, parse_ply, write_ply, PlyError, DecimateError
from .identifiers import PersistentIdentifier, PidRegistry
from .vocab import VocabularyStore, normalize_label

Clock = Callable[[], datetime.datetime]

# fetcher(url) -> (http status, body bytes or None); HEAD-style probes
# return None bodies, test stubs may return content for digest checks.
Fetcher = Callable[[str], tuple[int, bytes | None]]

_TOKEN_RE = re.compile(r"[a-z0-9]+")


class ServiceError(RepositoryError):
    def __init__(self, code: str, message: str, http_status: int = 400,
                 report: ValidationReport | None = None):
        super().__init__(code, message)
        self.http_status = http_status
        self.report = report


def _default_clock() -> datetime.datetime:
    return datetime.datetime.now(datetime.timezone.utc)


def _iso(ts: datetime.datetime) -> str:
    return ts.astimezone(datetime.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _tokenize(text: str) -> set[str]:
    return set(_TOKEN_RE.findall(normalize_label(text)))


class BlobStore:
    """Flat content-addressed directory: one file per SHA-256 key."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def put(self, data: bytes) -> str:
        key = _sha256(data)
        path = self.root / key
        if not path.exists():
            tmp = self.root / f"{key}.{uuid.uuid4().hex}.tmp"
            tmp.write_bytes(data)
            tmp.replace(path)
        return key

    def get(self, key: str) -> bytes:
        path = self.root / key
        if not path.is_file():
            raise ServiceError("NOT_FOUND", f"no blob {key}", 404)
        return path.read_bytes()

    def exists(self, key: str) -> bool:
        return (self.root / key).is_file()

    def scrub(self) -> list[str]:
        """Recompute every stored digest; return the keys that lie."""
        bad = []
        for path in sorted(self.root.iterdir()):
            if path.is_file() and not path.name.endswith(".tmp"):
                if _sha256(path.read_bytes()) != path.name:
                    bad.append(path.name)
        return bad


@dataclass
class StoredDeposit:
    deposit: Deposit
    owner: str
    version: int


@dataclass
class OaiRecord:
    identifier: str
    pid: str
    deposit_id: int
    datestamp: str
    deleted: bool = False


class CatalogStore:
    def __init__(self, config: ServiceConfig, clock: Clock | None = None,
                 vocab: VocabularyStore | None = None):
        self.config = config
        self.clock = clock or _default_clock
        self.data_dir = Path(config.data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.blobs = BlobStore(self.data_dir / "blobs")
        self.journal_path = self.data_dir / "catalog.jsonl"
        self.registry = PidRegistry(prefix=config.pid_prefix, namespace=config.pid_namespace)
        if vocab is None:
            vocab = VocabularyStore()
            vocab.load_bundled()
        self.vocab = vocab

        self._lock = threading.Lock()
        self._deposits: dict[int, StoredDeposit] = {}
        self._oai: dict[str, OaiRecord] = {}
        self._previews: dict[tuple[int, int], str] = {}
        self._replay()

    # -- persistence --------------------------------------------------------

    def _replay(self):
        if not self.journal_path.is_file():
            return
        with self.journal_path.open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    event = json.loads(line)
                except ValueError as exc:
                    raise RepositoryError("CORRUPT_JOURNAL", f"line {lineno}: {exc}")
                self._apply(event)

    def _apply(self, event: dict):
        kind = event["t"]
        if kind == "deposit":
            self._deposits[event["local_id"]] = StoredDeposit(
                deposit=deposit_from_dict(event["data"]),
                owner=event["owner"],
                version=event["version"],
            )
        elif kind == "mint":
            self.registry.mint(event["kind"], event["local_id"], event["year"])
        elif kind == "oai":
            self._oai[event["identifier"]] = OaiRecord(
                identifier=event["identifier"],
                pid=event["pid"],
                deposit_id=event["deposit_id"],
                datestamp=event["datestamp"],
                deleted=event.get("deleted", False),
            )
        elif kind == "preview":
            self._previews[(event["deposit_id"], event["object_id"])] = event["blob"]
        else:
            raise RepositoryError("CORRUPT_JOURNAL", f"unknown event type {kind!r}")

    def _append(self, event: dict):
        with self.journal_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False) + "\n")

    def _journal_deposit(self, local_id: int):
        stored = self._deposits[local_id]
        self._append({"t": "deposit", "local_id": local_id, "owner": stored.owner,
                      "version": stored.version, "data": deposit_to_dict(stored.deposit)})

    # -- auth ----------------------------------------------------------------

    def role_for(self, token: str | None) -> str:
        if token is None:
            return "public"
        return self.config.tokens.get(token, "public")

    def _require_role(self, token: str | None, minimum: str):
        if role_rank(self.role_for(token)) < role_rank(minimum):
            raise ServiceError("UNAUTHORIZED", f"requires the {minimum} role", 403)

    def _require_owner(self, token: str | None, stored: StoredDeposit):
        if self.role_for(token) == "curator":
            return
        if token is None or stored.owner != token:
            raise ServiceError("UNAUTHORIZED", "not the deposit owner", 403)

    def can_read(self, token: str | None, stored: StoredDeposit) -> bool:
        if self.role_for(token) == "curator" or (token is not None and stored.owner == token):
            return True
        return stored.deposit.status == "published" and stored.deposit.access_policy == "public"

    # -- lifecycle -----------------------------------------------------------

    def _get(self, deposit_id: int) -> StoredDeposit:
        stored = self._deposits.get(deposit_id)
        if stored is None:
            raise ServiceError("NOT_FOUND", f"no deposit {deposit_id}", 404)
        return stored

    def get_deposit(self, token: str | None, deposit_id: int) -> StoredDeposit:
        stored = self._get(deposit_id)
        if not self.can_read(token, stored):
            raise ServiceError("UNAUTHORIZED", "restricted deposit", 403)
        return stored

    def create_deposit(self, token: str | None, draft: dict) -> int:
        self._require_role(token, "depositor")
        with self._lock:
            try:
                deposit = deposit_from_dict(draft)
            except DraftShapeError as exc:
                raise ServiceError("VALIDATION", exc.message, 400)
            local_id = max(self._deposits, default=0) + 1
            deposit.local_id = local_id
            deposit.pid = None
            deposit.status = "draft"
            self._check_storage_refs(deposit)
            self._deposits[local_id] = StoredDeposit(deposit=deposit, owner=token, version=1)
            self._journal_deposit(local_id)
            return local_id

    def update_deposit(self, token: str | None, deposit_id: int, draft: dict,
                       expected_version: int | None = None) -> int:
        self._require_role(token, "depositor")
        with self._lock:
            stored = self._get(deposit_id)
            self._require_owner(token, stored)
            if stored.deposit.status == "published":
                raise ServiceError("FROZEN", "published deposits are immutable", 409)
            if expected_version is not None and expected_version != stored.version:
                raise ServiceError("CONFLICT",
                                   f"draft is at version {stored.version}, not {expected_version}", 409)
            try:
                deposit = deposit_from_dict(draft)
            except DraftShapeError as exc:
                raise ServiceError("VALIDATION", exc.message, 400)
            deposit.local_id = deposit_id
            deposit.pid = stored.deposit.pid
            deposit.status = "draft"
            self._check_storage_refs(deposit)
            stored.deposit = deposit
            stored.version += 1
            self._journal_deposit(deposit_id)
            return stored.version

    def _check_storage_refs(self, deposit: Deposit):
        for i, obj in enumerate(deposit.objects):
            for j, doc in enumerate(obj.documents):
                s = doc.storage
                if s is None:
                    continue
                if s.kind == "file":
                    raise ServiceError("BAD_STORAGE",
                                       f"objects.{i}.documents.{j}: file-path storage has no "
                                       "meaning on the server; upload the bytes instead", 400)
                if s.kind == "internal" and isinstance(s.ref, str) and not self.blobs.exists(s.ref):
                    raise ServiceError("BAD_STORAGE",
                                       f"objects.{i}.documents.{j}: unknown blob {s.ref}", 400)

    def _writable_object(self, token, deposit_id: int, object_id: int):
        stored = self._get(deposit_id)
        self._require_owner(token, stored)
        if stored.deposit.status == "published":
            raise ServiceError("FROZEN", "published deposits are immutable", 409)
        for obj in stored.deposit.objects:
            if obj.local_id == object_id:
                return stored, obj
        raise ServiceError("NOT_FOUND", f"deposit {deposit_id} has no object {object_id}", 404)

    def upload_document(self, token: str | None, deposit_id: int, object_id: int,
                        filename: str, data: bytes, media_role: str = "other"):
        self._require_role(token, "depositor")
        if not filename or "/" in filename or "\\" in filename or filename in (".", ".."):
            raise ServiceError("BAD_FILENAME", f"not a usable filename: {filename!r}", 400)
        with self._lock:
            stored, obj = self._writable_object(token, deposit_id, object_id)
            verdict = classify(filename, data, self.config.archivable_whitelist)
            key = self.blobs.put(data)
            record = DocumentRecord(
                filename=filename,
                media_role=media_role,
                byte_size=len(data),
                checksum=key,
                format_class=verdict.format_class,
                storage=StorageRef(kind="internal", ref=key),
                relations=[],
            )
            self._put_document(obj, record)
            stored.version += 1
            self._journal_deposit(deposit_id)
            return record, verdict

    def add_external_document(self, token: str | None, deposit_id: int, object_id: int,
                              url: str, expected_sha256: str | None,
                              media_role: str = "other") -> DocumentRecord:
        self._require_role(token, "depositor")
        from urllib.parse import urlparse
        parsed = urlparse(url or "")
        if parsed.scheme not in ("http", "https") or not parsed.netloc:
            raise ServiceError("BAD_URL", f"not an absolute http(s) URL: {url!r}", 400)
        if expected_sha256 is not None and not re.fullmatch(r"[0-9a-f]{64}", expected_sha256):
            raise ServiceError("BAD_CHECKSUM", "expected_sha256 must be 64 lowercase hex chars", 400)
        filename = Path(parsed.path).name or parsed.netloc
        with self._lock:
            stored, obj = self._writable_object(token, deposit_id, object_id)
            record = DocumentRecord(
                filename=filename,
                media_role=media_role,
                byte_size=0,
                checksum=expected_sha256,
                format_class="DepositOnly",
                storage=StorageRef(kind="external", ref=url),
                relations=[],
            )
            self._put_document(obj, record)
            stored.version += 1
            self._journal_deposit(deposit_id)
            return record

    @staticmethod
    def _put_document(obj, record: DocumentRecord):
        for i, doc in enumerate(obj.documents):
            if doc.filename == record.filename:
                record.relations = doc.relations  # keep hand-edited relations
                obj.documents[i] = record
                return
        obj.documents.append(record)

    def validation_report(self, deposit_id: int, publishing: bool = False) -> ValidationReport:
        stored = self._get(deposit_id)
        return validate_deposit(stored.deposit, vocab=self.vocab, publishing=publishing)

    def publish(self, token: str | None, deposit_id: int):
        self._require_role(token, "depositor")
        with self._lock:
            stored = self._get(deposit_id)
            self._require_owner(token, stored)
            if stored.deposit.status == "published":
                raise ServiceError("ALREADY_PUBLISHED", "deposit is already published", 409)
            report = validate_deposit(stored.deposit, vocab=self.vocab, publishing=True)
            if not report.ok:
                raise ServiceError("VALIDATION_FAILED",
                                   f"{len(report.errors)} validation error(s)", 422, report=report)
            year = self.clock().year
            if self.registry.is_minted("deposit", deposit_id):
                raise ServiceError("DUPLICATE_ID", f"deposit id {deposit_id} already minted", 409)

            pid = self.registry.mint("deposit", deposit_id, year)
            self._append({"t": "mint", "kind": "deposit", "local_id": deposit_id, "year": year})
            object_pids: list[PersistentIdentifier] = []
            for obj in stored.deposit.objects:
                opid = self.registry.mint_next("object", year)
                self._append({"t": "mint", "kind": "object", "local_id": opid.local_id, "year": year})
                obj.pid = opid
                object_pids.append(opid)
            stored.deposit.pid = pid
            stored.deposit.status = "published"
            stored.version += 1
            self._journal_deposit(deposit_id)

            self._generate_previews(deposit_id, stored.deposit)
            self._touch_oai(stored.deposit, deposit_id)
            return pid, object_pids

    def _touch_oai(self, deposit: Deposit, deposit_id: int):
        pid_str = deposit.pid.canonical()
        identifier = f"oai:{self.config.repo_id}:{pid_str}"
        now = _iso(self.clock())
        old = self._oai.get(identifier)
        datestamp = max(now, old.datestamp) if old else now
        record = OaiRecord(identifier=identifier, pid=pid_str, deposit_id=deposit_id,
                           datestamp=datestamp)
        self._oai[identifier] = record
        self._append({"t": "oai", "identifier": identifier, "pid": pid_str,
                      "deposit_id": deposit_id, "datestamp": datestamp, "deleted": False})

    def _generate_previews(self, deposit_id: int, deposit: Deposit):
        for obj in deposit.objects:
            doc = None
            if obj.final_model:
                doc = next((d for d in obj.documents if d.filename == obj.final_model), None)
            if doc is None:
                doc = next((d for d in obj.documents
                            if isinstance(d.filename, str) and d.filename.endswith(".ply")
                            and d.storage is not None and d.storage.kind == "internal"), None)
            if doc is None or doc.storage is None or doc.storage.kind != "internal":
                continue
            try:
                model = parse_ply(self.blobs.get(doc.storage.ref))
                preview = decimate(model, self.config.preview_point_budget, seed=0)
                key = self.blobs.put(write_ply(preview, "binary_little_endian"))
            except (PlyError, DecimateError, ServiceError):
                continue  # not a usable point source; deposits stay publishable
            self._previews[(deposit_id, obj.local_id)] = key
            self._append({"t": "preview", "deposit_id": deposit_id,
                          "object_id": obj.local_id, "blob": key})

    def preview_blob(self, token: str | None, deposit_id: int, object_id: int) -> bytes:
        self.get_deposit(token, deposit_id)  # rights check
        key = self._previews.get((deposit_id, object_id))
        if key is None:
            raise ServiceError("NOT_FOUND", "no preview derivative for this object", 404)
        return self.blobs.get(key)

    def new_version(self, token: str | None, deposit_id: int) -> int:
        """Curator-mediated successor draft of a published deposit."""
        self._require_role(token, "curator")
        with self._lock:
            stored = self._get(deposit_id)
            if stored.deposit.status != "published":
                raise ServiceError("NOT_PUBLISHED", "only published deposits get new versions", 409)
            data = deposit_to_dict(stored.deposit)
            new_id = max(self._deposits, default=0) + 1
            data["local_id"] = new_id
            data["pid"] = None
            data["status"] = "draft"
            predecessor = stored.deposit.pid.canonical()
            if predecessor not in data["related_publications"]:
                data["related_publications"].append(predecessor)
            for obj in data["objects"]:
                obj["pid"] = None
            deposit = deposit_from_dict(data)
            self._deposits[new_id] = StoredDeposit(deposit=deposit, owner=token, version=1)
            self._journal_deposit(new_id)
            return new_id

    # -- documents and packages ----------------------------------------------

    def document_bytes(self, token: str | None, deposit_id: int, object_id: int,
                       filename: str) -> bytes:
        stored = self.get_deposit(token, deposit_id)
        for obj in stored.deposit.objects:
            if obj.local_id != object_id:
                continue
            for doc in obj.documents:
                if doc.filename == filename:
                    if doc.storage is None or doc.storage.kind != "internal":
                        raise ServiceError("NOT_FOUND", "document bytes are not stored here", 404)
                    return self.blobs.get(doc.storage.ref)
        raise ServiceError("NOT_FOUND", f"no document {filename!r}", 404)

    def file_source(self, deposit: Deposit) -> dict[str, bytes]:
        source: dict[str, bytes] = {}
        for obj in deposit.objects:
            for doc in obj.documents:
                if doc.storage is not None and doc.storage.kind == "internal":
                    source[f"{obj.local_id}/{doc.filename}"] = self.blobs.get(doc.storage.ref)
        return source

    # -- link checking ---------------------------------------------------------

    def check_links(self, deposit_id: int, fetcher: Fetcher) -> ValidationReport:
        stored = self._get(deposit_id)
        errors: list[ReportEntry] = []
        warnings: list[ReportEntry] = []
        for i, obj in enumerate(stored.deposit.objects):
            for j, doc in enumerate(obj.documents):
                if doc.storage is None or doc.storage.kind != "external":
                    continue
                path = f"objects.{i}.documents.{j}.storage"
                url = doc.storage.ref
                try:
                    status, body = fetcher(url)
                except Exception as exc:
                    warnings.append(ReportEntry(path, "LINK_DEAD", f"{url}: {exc}"))
                    continue
                if status >= 400:
                    warnings.append(ReportEntry(path, "LINK_DEAD", f"{url}: HTTP {status}"))
                    continue
                if body is not None and isinstance(doc.checksum, str) and doc.checksum:
                    if _sha256(body) != doc.checksum:
                        errors.append(ReportEntry(path, "LINK_CONTENT_CHANGED",
                                                  f"{url}: content digest changed"))
        key = lambda e: (e.path, e.code, e.message)
        return ValidationReport(errors=sorted(errors, key=key), warnings=sorted(warnings, key=key))

    # -- search -----------------------------------------------------------------

    def _search_text(self, deposit: Deposit) -> set[str]:
        parts = [str(deposit.title or ""), str(deposit.scientific_objectives or "")]
        for terms in (deposit.period_terms, deposit.place_terms, deposit.subject_terms):
            for t in terms:
                if isinstance(t.label, str):
                    parts.append(t.label)
        for obj in deposit.objects:
            parts.append(str(obj.title or ""))
        return _tokenize(" ".join(parts))

    def visible_published(self, token: str | None) -> list[StoredDeposit]:
        return [s for s in self._deposits.values()
                if s.deposit.status == "published" and self.can_read(token, s)]

    def search(self, token: str | None, query: str = "", period: str = "", place: str = "",
               category: str = "", page: int = 1, page_size: int | None = None):
        page_size = page_size or self.config.search_page_size
        tokens = _tokenize(query)
        hits = []
        for stored in self.visible_published(token):
            d = stored.deposit
            if category and not any(obj.category == category for obj in d.objects):
                continue
            if period and not _filter_terms(d.period_terms, period):
                continue
            if place and not _filter_terms(d.place_terms, place):
                continue
            if tokens:
                text = self._search_text(d)
                score = sum(1 for t in tokens if t in text)
                if score == 0:
                    continue
            else:
                score = 0
            hits.append((-score, d.pid.canonical(), stored))
        hits.sort(key=lambda h: (h[0], h[1]))
        total = len(hits)
        start = (max(page, 1) - 1) * page_size
        return total, [s for _, _, s in hits[start:start + page_size]]

    # -- oai --------------------------------------------------------------------

    def oai_records(self) -> list[OaiRecord]:
        """Harvestable set: published, public deposits, one record each."""
        records = []
        for rec in self._oai.values():
            stored = self._deposits.get(rec.deposit_id)
            if stored is None or stored.deposit.status != "published":
                continue
            if stored.deposit.access_policy != "public":
                continue
            records.append(rec)
        records.sort(key=lambda r: (r.datestamp, r.identifier))
        return records

    def oai_lookup(self, identifier: str) -> OaiRecord | None:
        for rec in self.oai_records():
            if rec.identifier == identifier:
                return rec
        return None

    def deposit_for_record(self, rec: OaiRecord) -> Deposit:
        return self._deposits[rec.deposit_id].deposit


def _filter_terms(terms, needle: str) -> bool:
    n = normalize_label(needle)
    for t in terms:
        if isinstance(t.label, str) and n in normalize_label(t.label):
            return True
        if isinstance(t.uri, str) and needle in t.uri:
            return True
    return False
