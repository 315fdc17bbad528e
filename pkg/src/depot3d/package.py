"""Long-term archive submission packages.

On-disk layout, mirroring the deposit -> object -> document hierarchy:

    <root>/manifest.json
    <root>/deposit.json
    <root>/objects/<object_local_id>/object.json
    <root>/objects/<object_local_id>/files/<filename>

deposit.json holds the interchange form of the deposit with its objects
replaced by the ordered list of their ids; each object.json holds the full
object with internal storage refs rewritten to package-relative paths.
External-URL documents stay metadata-only: their URL and recorded checksum
travel in object.json but they contribute no payload file.

The manifest lists every file except itself, sorted by path (byte-wise,
"/"-separated on every platform), and carries a package-level digest
computed over the canonical JSON form of (version, created, entries), so
a mutation anywhere in the manifest is detectable too.
"""

from __future__ import annotations

import dataclasses
import datetime
import hashlib
import json
import os
import shutil
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .catalog import (
    Deposit,
    StorageRef,
    ValidationReport,
    deposit_from_dict,
    deposit_to_dict,
    validate_deposit,
)
from .catalog.validation import ReportEntry
from .errors import RepositoryError

PACKAGE_FORMAT_VERSION = "1"
MANIFEST_NAME = "manifest.json"


class PackageError(RepositoryError):
    def __init__(self, code: str, message: str, report: ValidationReport | None = None):
        super().__init__(code, message)
        self.report = report


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    byte_size: int
    sha256: str
    format_class: str

    def to_dict(self) -> dict:
        return {"path": self.path, "byte_size": self.byte_size,
                "sha256": self.sha256, "format_class": self.format_class}


@dataclass
class Manifest:
    package_format_version: str
    created: str
    entries: list[ManifestEntry] = field(default_factory=list)
    package_digest: str = ""

    def to_dict(self) -> dict:
        return {
            "package_format_version": self.package_format_version,
            "created": self.created,
            "entries": [e.to_dict() for e in self.entries],
            "package_digest": self.package_digest,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Manifest":
        return cls(
            package_format_version=d["package_format_version"],
            created=d["created"],
            entries=[ManifestEntry(path=e["path"], byte_size=e["byte_size"],
                                   sha256=e["sha256"], format_class=e["format_class"])
                     for e in d["entries"]],
            package_digest=d["package_digest"],
        )


@dataclass
class ArchivePackage:
    root: Path
    manifest: Manifest
    deposit: Deposit


def _utc_now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _dump_json(payload: dict) -> bytes:
    return (json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _digest_input(version: str, created: str, entries: list[ManifestEntry]) -> bytes:
    core = {"package_format_version": version, "created": created,
            "entries": [e.to_dict() for e in entries]}
    return json.dumps(core, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def compute_package_digest(version: str, created: str, entries: list[ManifestEntry]) -> str:
    return _sha256(_digest_input(version, created, entries))


def _resolve_bytes(file_source: Mapping[str, bytes], object_id, filename: str) -> bytes | None:
    composite = f"{object_id}/{filename}"
    if composite in file_source:
        return file_source[composite]
    return file_source.get(filename)


def build_package(d: Deposit, file_source: Mapping[str, bytes], out_dir: str | Path,
                  created: str | None = None) -> ArchivePackage:
    """Assemble the archive package for a validated deposit.

    ``file_source`` maps document filenames (or "<object_id>/<filename>"
    when two objects share a name) to their bytes; external documents need
    no entry. All-or-nothing: validation and file collection happen before
    anything touches the filesystem, and the tree is staged then renamed
    into place.
    """
    report = validate_deposit(d)
    if not report.ok:
        raise PackageError("VALIDATION_FAILED",
                           f"deposit has {len(report.errors)} validation error(s)", report=report)

    created = created or _utc_now()
    out_dir = Path(out_dir)

    # Collect every file's bytes up front; nothing is written on failure.
    files: dict[str, bytes] = {}
    snapshot = deposit_to_dict(d)
    object_dicts: list[tuple[int, dict]] = []
    for obj, obj_dict in zip(d.objects, snapshot["objects"]):
        for doc, doc_dict in zip(obj.documents, obj_dict["documents"]):
            if doc.storage is not None and doc.storage.kind == "external":
                continue
            data = _resolve_bytes(file_source, obj.local_id, doc.filename)
            if data is None:
                raise PackageError("MISSING_FILE", f"no bytes provided for {doc.filename!r}")
            if doc.checksum is not None and _sha256(data) != doc.checksum:
                raise PackageError("FILE_DIGEST_MISMATCH",
                                   f"bytes for {doc.filename!r} do not match the recorded checksum")
            rel = f"objects/{obj.local_id}/files/{doc.filename}"
            files[rel] = data
            doc_dict["storage"] = {"kind": "file", "path": rel}
        object_dicts.append((obj.local_id, obj_dict))

    snapshot["objects"] = [oid for oid, _ in object_dicts]
    files["deposit.json"] = _dump_json(snapshot)
    for oid, obj_dict in object_dicts:
        files[f"objects/{oid}/object.json"] = _dump_json(obj_dict)

    entries = [ManifestEntry(path=path, byte_size=len(data), sha256=_sha256(data),
                             format_class=_format_class_for(path, d))
               for path, data in files.items()]
    entries.sort(key=lambda e: e.path)
    manifest = Manifest(package_format_version=PACKAGE_FORMAT_VERSION, created=created,
                        entries=entries,
                        package_digest=compute_package_digest(PACKAGE_FORMAT_VERSION, created, entries))

    staging = out_dir.parent / (out_dir.name + ".building")
    try:
        if out_dir.exists():
            raise PackageError("IO_FAILURE", f"output directory {out_dir} already exists")
        out_dir.parent.mkdir(parents=True, exist_ok=True)
        if staging.exists():
            shutil.rmtree(staging)
        for rel, data in files.items():
            target = staging / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(data)
        (staging / MANIFEST_NAME).write_bytes(_dump_json(manifest.to_dict()))
        os.rename(staging, out_dir)
    except OSError as exc:
        shutil.rmtree(staging, ignore_errors=True)
        raise PackageError("IO_FAILURE", f"cannot write package: {exc}")

    return ArchivePackage(root=out_dir, manifest=manifest, deposit=d)


def _format_class_for(path: str, d: Deposit) -> str:
    if path.endswith(".json"):
        return "Archivable"  # UTF-8 JSON metadata is plain text
    parts = path.split("/")
    oid, filename = int(parts[1]), parts[3]
    for obj in d.objects:
        if obj.local_id == oid:
            for doc in obj.documents:
                if doc.filename == filename:
                    return doc.format_class
    return "DepositOnly"  # pragma: no cover - layout guarantees a match


def verify_package(root: str | Path) -> ValidationReport:
    """Fixity check: recompute every digest; report problems, never raise
    for content issues. Raises PackageError(NOT_A_PACKAGE) only when there
    is no manifest to check against."""
    root = Path(root)
    manifest_path = root / MANIFEST_NAME
    if not manifest_path.is_file():
        raise PackageError("NOT_A_PACKAGE", f"{root} has no {MANIFEST_NAME}")

    errors: list[ReportEntry] = []
    warnings: list[ReportEntry] = []
    raw = manifest_path.read_bytes()
    try:
        manifest = Manifest.from_dict(json.loads(raw.decode("utf-8")))
    except (ValueError, KeyError, TypeError, UnicodeDecodeError) as exc:
        errors.append(ReportEntry(MANIFEST_NAME, "MANIFEST_UNREADABLE", f"cannot parse manifest: {exc}"))
        return ValidationReport(errors=errors, warnings=warnings)

    if _dump_json(manifest.to_dict()) != raw:
        errors.append(ReportEntry(MANIFEST_NAME, "MANIFEST_NOT_CANONICAL",
                                  "manifest bytes differ from their canonical form"))
    paths = [e.path for e in manifest.entries]
    if paths != sorted(paths):
        errors.append(ReportEntry(MANIFEST_NAME, "MANIFEST_UNSORTED", "entries are not sorted by path"))
    expected = compute_package_digest(manifest.package_format_version, manifest.created,
                                      manifest.entries)
    if expected != manifest.package_digest:
        errors.append(ReportEntry(MANIFEST_NAME, "PACKAGE_DIGEST_MISMATCH",
                                  "package digest does not match the manifest contents"))

    listed = set()
    for entry in manifest.entries:
        if entry.path.startswith("/") or ".." in entry.path.split("/"):
            errors.append(ReportEntry(entry.path, "BAD_PATH", "entry path escapes the package"))
            continue
        listed.add(entry.path)
        target = root / entry.path
        if not target.is_file():
            errors.append(ReportEntry(entry.path, "MISSING_FILE", "listed file is absent"))
            continue
        data = target.read_bytes()
        if len(data) != entry.byte_size:
            errors.append(ReportEntry(entry.path, "SIZE_MISMATCH",
                                      f"{len(data)} bytes on disk, {entry.byte_size} listed"))
        if _sha256(data) != entry.sha256:
            errors.append(ReportEntry(entry.path, "CHECKSUM_MISMATCH",
                                      "recomputed digest differs from the manifest"))

    for path in sorted(p.relative_to(root).as_posix() for p in root.rglob("*") if p.is_file()):
        if path != MANIFEST_NAME and path not in listed:
            warnings.append(ReportEntry(path, "EXTRA_FILE", "file on disk is not listed in the manifest"))

    key = lambda e: (e.path, e.code, e.message)
    return ValidationReport(errors=sorted(errors, key=key), warnings=sorted(warnings, key=key))


def load_package(root: str | Path) -> tuple[Deposit, Manifest]:
    """Re-ingest a package: verify first, then deserialize the deposit."""
    root = Path(root)
    report = verify_package(root)
    if not report.ok:
        first = report.errors[0]
        raise PackageError("PACKAGE_INVALID",
                           f"verification failed at {first.path}: {first.code}", report=report)

    manifest = Manifest.from_dict(json.loads((root / MANIFEST_NAME).read_text("utf-8")))
    snapshot = json.loads((root / "deposit.json").read_text("utf-8"))
    objects = []
    for oid in snapshot.get("objects", []):
        obj_path = root / "objects" / str(oid) / "object.json"
        objects.append(json.loads(obj_path.read_text("utf-8")))
    snapshot["objects"] = objects
    deposit = deposit_from_dict(snapshot)
    return deposit, manifest


def rewrite_storage_to_package(d: Deposit) -> Deposit:
    """The storage-ref rewrite a build applies, as a pure function (handy
    for round-trip comparisons in callers and tests)."""
    objects = []
    for obj in d.objects:
        docs = []
        for doc in obj.documents:
            if doc.storage is not None and doc.storage.kind != "external":
                rel = f"objects/{obj.local_id}/files/{doc.filename}"
                doc = dataclasses.replace(doc, storage=StorageRef(kind="file", ref=rel))
            docs.append(doc)
        objects.append(dataclasses.replace(obj, documents=docs))
    return dataclasses.replace(d, objects=objects)
