"""Command-line front door: build deposits offline, validate, package, and
push to a running service.

    depot3d new --title "..." [--creator NAME] [--draft deposit.json]
    depot3d attach OBJECT FILE [--role final-model] [--draft deposit.json]
    depot3d meta set PATH VALUE [--draft deposit.json]
    depot3d validate [--json] [--draft deposit.json]
    depot3d package OUT_DIR [--draft deposit.json]
    depot3d push --server URL --token T [--publish] [--draft deposit.json]
    depot3d harvest URL [--out DIR]
    depot3d serve --config config.json

Exit codes: 0 ok, 1 validation problems / bad fields, 2 I/O and network
failures. Draft edits are atomic: new content goes to a temp file that
replaces the draft, so an interrupted command never corrupts it.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import os
import re
import sys
import tempfile
import xml.etree.ElementTree as ET
from pathlib import Path

import httpx

from .catalog import (
    DraftShapeError,
    deposit_from_dict,
    schema_descriptor,
    validate_deposit,
)
from .errors import RepositoryError
from .formats import classify
from .package import PackageError, build_package

_OAI_NS = "{http://www.openarchives.org/OAI/2.0/}"


class CliError(Exception):
    def __init__(self, message: str, exit_code: int = 1):
        super().__init__(message)
        self.exit_code = exit_code


# -- draft file handling ------------------------------------------------------

def load_draft(path: Path) -> dict:
    try:
        data = json.loads(path.read_text("utf-8"))
    except FileNotFoundError:
        raise CliError(f"draft file {path} does not exist", 2)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read draft {path}: {exc}", 2)
    if not isinstance(data, dict):
        raise CliError(f"draft {path} is not a JSON object", 2)
    return data


def save_draft(path: Path, draft: dict):
    payload = json.dumps(draft, indent=2, ensure_ascii=False) + "\n"
    fd, tmp = tempfile.mkstemp(prefix=path.name + ".", dir=str(path.parent or Path(".")))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise CliError(f"cannot write draft {path}: {exc}", 2)


def empty_draft() -> dict:
    draft: dict = {}
    for f in schema_descriptor().deposit:
        if f.kind in ("agent-list", "vocab-list", "string-list", "object-list"):
            draft[f.key] = []
        else:
            draft[f.key] = None
    draft["local_id"] = 1
    draft["access_policy"] = "public"
    draft["status"] = "draft"
    return draft


def empty_object(local_id: int) -> dict:
    obj: dict = {}
    for f in schema_descriptor().object:
        if f.kind in ("agent-list", "document-list"):
            obj[f.key] = []
        else:
            obj[f.key] = None
    obj["local_id"] = local_id
    obj["contributors"] = []
    return obj


def _object_id(ref: str) -> int:
    m = re.fullmatch(r"(?:obj)?(\d+)", ref)
    if m is None:
        raise CliError(f"object must be an id like 2 or obj2, got {ref!r}", 1)
    return int(m.group(1))


def _find_object(draft: dict, local_id: int, create: bool = False) -> dict:
    objects = draft.setdefault("objects", [])
    for obj in objects:
        if isinstance(obj, dict) and obj.get("local_id") == local_id:
            return obj
    if not create:
        raise CliError(f"draft has no object {local_id}", 1)
    obj = empty_object(local_id)
    objects.append(obj)
    return obj


# -- metadata editing -----------------------------------------------------------

def _parse_value(field, raw: str, subkey: str | None):
    kind = field.kind
    if subkey is not None:
        if kind == "year-range" and subkey in ("min", "max"):
            try:
                return int(raw)
            except ValueError:
                raise CliError(f"{field.key}.{subkey} needs an integer year, got {raw!r}", 1)
        if kind == "agent" and subkey in ("name", "role_note", "org"):
            return raw
        raise CliError(f"{field.key} has no component {subkey!r}", 1)
    if kind == "integer":
        try:
            return int(raw)
        except ValueError:
            raise CliError(f"{field.key} needs an integer, got {raw!r}", 1)
    if kind == "date":
        try:
            datetime.date.fromisoformat(raw)
        except ValueError:
            raise CliError(f"{field.key} needs an ISO date (YYYY-MM-DD), got {raw!r}", 1)
        return raw
    if kind == "enum":
        if field.enum and raw not in field.enum and not field.open_enum:
            raise CliError(f"{field.key} must be one of: {', '.join(field.enum)}", 1)
        return raw
    if kind in ("string", "text", "pid", "checksum"):
        return raw
    if kind == "agent":
        parsed = _maybe_json(raw)
        return parsed if isinstance(parsed, dict) else {"name": raw, "role_note": None, "org": None}
    if kind in ("agent-list", "vocab-list", "string-list", "relation-list"):
        parsed = _maybe_json(raw)
        if isinstance(parsed, list):
            return parsed
        if kind == "agent-list":
            return [{"name": name.strip(), "role_note": None, "org": None}
                    for name in raw.split(";") if name.strip()]
        if kind == "string-list":
            return [part.strip() for part in raw.split(";") if part.strip()]
        raise CliError(f"{field.key} needs a JSON array", 1)
    if kind == "year-range":
        parsed = _maybe_json(raw)
        if isinstance(parsed, dict) and set(parsed) >= {"min", "max"}:
            return {"min": parsed["min"], "max": parsed["max"]}
        raise CliError(f'{field.key} needs JSON like {{"min": -50, "max": 200}} '
                       "or use .min/.max paths", 1)
    raise CliError(f"{field.key} cannot be set from the command line", 1)


def _maybe_json(raw: str):
    try:
        return json.loads(raw)
    except ValueError:
        return None


def meta_set(draft: dict, path: str, raw: str):
    parts = path.split(".")
    schema = schema_descriptor()
    if parts[0] == "objects":
        if len(parts) < 3:
            raise CliError("object paths look like objects.<id>.<field>", 1)
        obj = _find_object(draft, _object_id(parts[1]), create=True)
        if parts[2] == "documents":
            if len(parts) < 5:
                raise CliError("document paths look like objects.<id>.documents.<filename>.<field>", 1)
            filename, key = parts[3], parts[4]
            field = schema.field_for("document", key)
            if field is None:
                raise CliError(f"unknown document field {key!r}", 1)
            doc = next((d for d in obj.get("documents", [])
                        if isinstance(d, dict) and d.get("filename") == filename), None)
            if doc is None:
                raise CliError(f"object has no document {filename!r}; attach it first", 1)
            doc[key] = _parse_value(field, raw, parts[5] if len(parts) > 5 else None)
            return
        key = parts[2]
        field = schema.field_for("object", key)
        if field is None:
            raise CliError(f"unknown object field {key!r}", 1)
        subkey = parts[3] if len(parts) > 3 else None
        _assign(obj, key, field, raw, subkey)
        return
    key = parts[0]
    field = schema.field_for("deposit", key)
    if field is None:
        raise CliError(f"unknown deposit field {key!r}", 1)
    if key == "objects":
        raise CliError("use attach / objects.<id>.<field> to edit objects", 1)
    subkey = parts[1] if len(parts) > 1 else None
    _assign(draft, key, field, raw, subkey)


def _assign(target: dict, key: str, field, raw: str, subkey: str | None):
    value = _parse_value(field, raw, subkey)
    if subkey is None:
        target[key] = value
        return
    slot = target.get(key)
    if not isinstance(slot, dict):
        slot = {}
        if field.kind == "year-range":
            slot = {"min": None, "max": None}
        elif field.kind == "agent":
            slot = {"name": None, "role_note": None, "org": None}
        target[key] = slot
    slot[subkey] = value


# -- report printing ---------------------------------------------------------------

def print_report(report, as_json: bool):
    if as_json:
        print(json.dumps(report.to_dict(), indent=2, ensure_ascii=False))
        return
    for entry in report.errors:
        print(f"ERROR    {entry.path}: {entry.code} - {entry.message}")
    for entry in report.warnings:
        print(f"WARNING  {entry.path}: {entry.code} - {entry.message}")
    print(f"{len(report.errors)} error(s), {len(report.warnings)} warning(s)")


# -- remote client -------------------------------------------------------------------

def _make_client(server: str, token: str | None) -> httpx.Client:
    headers = {"Authorization": f"Bearer {token}"} if token else {}
    return httpx.Client(base_url=server, headers=headers, timeout=30.0)


def _checked(response: httpx.Response) -> dict:
    if response.status_code >= 400:
        try:
            body = response.json()
        except ValueError:
            raise CliError(f"server returned HTTP {response.status_code}", 2)
        code = body.get("error", "SERVER_ERROR")
        message = body.get("message", "")
        exit_code = 1 if code in ("VALIDATION_FAILED", "VALIDATION") else 2
        report = body.get("report")
        if report:
            for entry in report.get("errors", []):
                print(f"ERROR    {entry['path']}: {entry['code']} - {entry['message']}")
        raise CliError(f"server refused: {code} {message}".strip(), exit_code)
    return response.json() if response.content else {}


# -- commands ---------------------------------------------------------------------------

def cmd_new(args) -> int:
    path = Path(args.draft)
    if path.exists():
        raise CliError(f"{path} already exists; pick another --draft path", 2)
    draft = empty_draft()
    if args.title:
        draft["title"] = args.title
    if args.creator:
        draft["deposit_creator"] = {"name": args.creator, "role_note": None, "org": None}
    draft["deposit_date"] = datetime.date.today().isoformat()
    save_draft(path, draft)
    if args.json:
        print(json.dumps(draft, indent=2, ensure_ascii=False))
    else:
        print(f"created draft {path}")
    return 0


def cmd_attach(args) -> int:
    path = Path(args.draft)
    draft = load_draft(path)
    file_path = Path(args.file)
    try:
        data = file_path.read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {file_path}: {exc}", 2)

    verdict = classify(file_path.name, data)
    draft_dir = path.resolve().parent
    try:
        stored = os.path.relpath(file_path.resolve(), draft_dir)
    except ValueError:  # different drive on windows
        stored = str(file_path.resolve())
    record = {
        "filename": file_path.name,
        "media_role": args.role,
        "byte_size": len(data),
        "checksum": hashlib.sha256(data).hexdigest(),
        "format_class": verdict.format_class,
        "storage": {"kind": "file", "path": stored.replace(os.sep, "/")},
        "relations": [],
    }
    obj = _find_object(draft, _object_id(args.object), create=True)
    docs = obj.setdefault("documents", [])
    for i, doc in enumerate(docs):
        if isinstance(doc, dict) and doc.get("filename") == record["filename"]:
            record["relations"] = doc.get("relations", [])
            docs[i] = record
            break
    else:
        docs.append(record)
    if args.role == "final-model":
        obj["final_model"] = record["filename"]
    save_draft(path, draft)
    if args.json:
        print(json.dumps({"document": record, "verdict": verdict.to_dict()},
                         indent=2, ensure_ascii=False))
    else:
        print(f"attached {record['filename']} to object {obj['local_id']} "
              f"[{verdict.format_class}, {verdict.detected_format}]")
    return 0


def cmd_meta(args) -> int:
    if args.action != "set":
        raise CliError("only 'meta set <path> <value>' is supported", 1)
    path = Path(args.draft)
    draft = load_draft(path)
    meta_set(draft, args.path, args.value)
    save_draft(path, draft)
    if args.json:
        parsed = _maybe_json(args.value)
        print(json.dumps({args.path: args.value if parsed is None else parsed}))
    else:
        print(f"set {args.path}")
    return 0


def cmd_validate(args) -> int:
    draft = load_draft(Path(args.draft))
    try:
        deposit = deposit_from_dict(draft)
    except DraftShapeError as exc:
        raise CliError(f"unreadable draft: {exc.message}", 1)
    report = validate_deposit(deposit)
    print_report(report, args.json)
    return 0 if report.ok else 1


def cmd_package(args) -> int:
    path = Path(args.draft)
    draft = load_draft(path)
    try:
        deposit = deposit_from_dict(draft)
    except DraftShapeError as exc:
        raise CliError(f"unreadable draft: {exc.message}", 1)

    draft_dir = path.resolve().parent
    source: dict[str, bytes] = {}
    for obj in deposit.objects:
        for doc in obj.documents:
            if doc.storage is None or doc.storage.kind == "external":
                continue
            if doc.storage.kind != "file":
                raise CliError(f"document {doc.filename!r} is stored remotely; "
                               "download it next to the draft first", 2)
            file_path = draft_dir / doc.storage.ref
            try:
                source[f"{obj.local_id}/{doc.filename}"] = file_path.read_bytes()
            except OSError as exc:
                raise CliError(f"cannot read {file_path}: {exc}", 2)

    try:
        built = build_package(deposit, source, Path(args.out_dir))
    except PackageError as exc:
        if exc.code == "VALIDATION_FAILED" and exc.report is not None:
            print_report(exc.report, args.json)
            return 1
        raise CliError(exc.message, 2)
    if args.json:
        print(json.dumps(built.manifest.to_dict(), indent=2, ensure_ascii=False))
    else:
        print(f"package written to {built.root} "
              f"({len(built.manifest.entries)} files, digest {built.manifest.package_digest[:12]}...)")
    return 0


def cmd_push(args) -> int:
    path = Path(args.draft)
    draft = load_draft(path)
    if not args.server:
        raise CliError("push needs --server URL", 2)
    draft_dir = path.resolve().parent

    skeleton = json.loads(json.dumps(draft))
    for obj in skeleton.get("objects", []) or []:
        if isinstance(obj, dict):
            obj["documents"] = []
            obj["final_model"] = None

    try:
        with _make_client(args.server, args.token) as client:
            created = _checked(client.post("/api/deposits", json=skeleton))
            deposit_id = created["local_id"]

            for obj in draft.get("objects", []) or []:
                if not isinstance(obj, dict):
                    continue
                oid = obj.get("local_id")
                for doc in obj.get("documents", []) or []:
                    if not isinstance(doc, dict):
                        continue
                    storage = doc.get("storage") or {}
                    role = doc.get("media_role") or "other"
                    if storage.get("kind") == "external":
                        _checked(client.post(
                            f"/api/deposits/{deposit_id}/objects/{oid}/documents/external",
                            json={"url": storage.get("url") or storage.get("ref"),
                                  "expected_sha256": doc.get("checksum"),
                                  "media_role": role}))
                        continue
                    file_path = draft_dir / (storage.get("path") or storage.get("ref") or "")
                    try:
                        data = file_path.read_bytes()
                    except OSError as exc:
                        raise CliError(f"cannot read {file_path}: {exc}", 2)
                    _checked(client.post(
                        f"/api/deposits/{deposit_id}/objects/{oid}/documents",
                        params={"filename": doc.get("filename"), "media_role": role},
                        content=data))

            remote = _checked(client.get(f"/api/deposits/{deposit_id}"))
            merged = remote["deposit"]
            for obj in merged.get("objects", []):
                local_obj = next((o for o in draft.get("objects", [])
                                  if isinstance(o, dict) and o.get("local_id") == obj.get("local_id")), None)
                if local_obj is None:
                    continue
                obj["final_model"] = local_obj.get("final_model")
                for doc in obj.get("documents", []):
                    local_doc = next((d for d in local_obj.get("documents", [])
                                      if isinstance(d, dict)
                                      and d.get("filename") == doc.get("filename")), None)
                    if local_doc is not None:
                        doc["relations"] = local_doc.get("relations", [])
            _checked(client.put(f"/api/deposits/{deposit_id}",
                                json={"deposit": merged, "expected_version": remote["version"]}))

            result = {"local_id": deposit_id, "server": args.server}
            if args.publish:
                published = _checked(client.post(f"/api/deposits/{deposit_id}/publish"))
                result.update(published)
    except httpx.HTTPError as exc:
        raise CliError(f"network failure: {exc}", 2)

    if args.json:
        print(json.dumps(result, indent=2))
    else:
        print(f"pushed deposit as id {deposit_id}"
              + (f", published as {result['pid']}" if args.publish else ""))
    return 0


def _sanitize(identifier: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", identifier)


def cmd_harvest(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    state_path = out_dir / ".harvest-state.json"
    state: dict[str, str] = {}
    if state_path.is_file():
        try:
            state = json.loads(state_path.read_text("utf-8"))
        except ValueError:
            state = {}

    params: dict[str, str] = {"verb": "ListRecords", "metadataPrefix": "oai_dc"}
    if state:
        params["from"] = max(state.values())

    written = 0
    try:
        with _make_client(args.server or args.url, args.token) as client:
            url = args.url
            while True:
                response = client.get(url, params=params)
                if response.status_code >= 400:
                    raise CliError(f"harvest failed: HTTP {response.status_code}", 2)
                root = ET.fromstring(response.content)
                error = root.find(f"{_OAI_NS}error")
                if error is not None:
                    if error.get("code") == "noRecordsMatch":
                        break
                    raise CliError(f"harvest failed: {error.get('code')} {error.text or ''}", 2)
                list_el = root.find(f"{_OAI_NS}ListRecords")
                if list_el is None:
                    raise CliError("harvest failed: response has no ListRecords", 2)
                for record in list_el.findall(f"{_OAI_NS}record"):
                    header = record.find(f"{_OAI_NS}header")
                    identifier = header.findtext(f"{_OAI_NS}identifier", "")
                    datestamp = header.findtext(f"{_OAI_NS}datestamp", "")
                    if state.get(identifier) == datestamp:
                        continue
                    metadata = record.find(f"{_OAI_NS}metadata")
                    if metadata is None or len(metadata) == 0:
                        continue
                    payload = ET.tostring(metadata[0], encoding="UTF-8", xml_declaration=True)
                    (out_dir / f"{_sanitize(identifier)}.xml").write_bytes(payload)
                    state[identifier] = datestamp
                    written += 1
                token_el = list_el.find(f"{_OAI_NS}resumptionToken")
                if token_el is None or not (token_el.text or "").strip():
                    break
                params = {"verb": "ListRecords", "resumptionToken": token_el.text.strip()}
    except ET.ParseError as exc:
        raise CliError(f"harvest failed: bad XML from server ({exc})", 2)
    except httpx.HTTPError as exc:
        raise CliError(f"network failure: {exc}", 2)

    state_path.write_text(json.dumps(state, indent=2, sort_keys=True), "utf-8")
    if args.json:
        print(json.dumps({"written": written, "known": len(state)}))
    else:
        print(f"harvested {written} new/updated record(s) into {out_dir}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .config import ServiceConfig
    from .service import create_app

    config = ServiceConfig.from_file(args.config) if args.config else ServiceConfig()
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


# -- argument wiring -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--draft", default="deposit.json", help="draft file (default deposit.json)")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--server", default=None, help="service base URL")
    common.add_argument("--token", default=None, help="bearer token")

    parser = argparse.ArgumentParser(prog="depot3d",
                                     description="Deposit builder and client for the 3D data repository")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("new", parents=[common], help="scaffold a new deposit draft")
    p.add_argument("--title", default=None)
    p.add_argument("--creator", default=None)
    p.set_defaults(func=cmd_new)

    p = sub.add_parser("attach", parents=[common], help="attach a file to a virtual object")
    p.add_argument("object", help="object id (2 or obj2); created if missing")
    p.add_argument("file", help="file to attach")
    p.add_argument("--role", default="other", help="media role (e.g. final-model)")
    p.set_defaults(func=cmd_attach)

    p = sub.add_parser("meta", parents=[common], help="edit metadata fields")
    p.add_argument("action", choices=["set"])
    p.add_argument("path", help="field path, e.g. title or archaeological_date_range.min")
    p.add_argument("value")
    p.set_defaults(func=cmd_meta)

    p = sub.add_parser("validate", parents=[common], help="validate the draft")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("package", parents=[common], help="build an archive package")
    p.add_argument("out_dir")
    p.set_defaults(func=cmd_package)

    p = sub.add_parser("push", parents=[common], help="create the deposit on a server")
    p.add_argument("--publish", action="store_true", help="publish after uploading")
    p.set_defaults(func=cmd_push)

    p = sub.add_parser("harvest", parents=[common], help="harvest an OAI-PMH endpoint")
    p.add_argument("url", help="endpoint URL, e.g. http://host:8734/oai")
    p.add_argument("--out", default="harvest", help="output directory")
    p.set_defaults(func=cmd_harvest)

    p = sub.add_parser("serve", parents=[common], help="run the repository service")
    p.add_argument("--config", default=None, help="service config JSON")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"depot3d: {exc}", file=sys.stderr)
        return exc.exit_code
    except RepositoryError as exc:
        print(f"depot3d: {exc.code}: {exc.message}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
