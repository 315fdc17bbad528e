"""OAI-PMH 2.0 data provider over the catalog store.

Implements Identify, ListMetadataFormats, ListIdentifiers, ListRecords and
GetRecord with oai_dc payloads and opaque resumption tokens (an encoded
cursor). Protocol errors are in-band <error> elements, never HTTP errors.
Restricted deposits are excluded from harvesting entirely.
"""

from __future__ import annotations

import base64
import binascii
import datetime
import json
import re
import xml.etree.ElementTree as ET

from .catalog import to_dublin_core
from .store import CatalogStore, OaiRecord

OAI_NS = "http://www.openarchives.org/OAI/2.0/"
OAI_DC_NS = "http://www.openarchives.org/OAI/2.0/oai_dc/"
DC_NS = "http://purl.org/dc/elements/1.1/"
XSI_NS = "http://www.w3.org/2001/XMLSchema-instance"
OAI_SCHEMA = "http://www.openarchives.org/OAI/2.0/OAI-PMH.xsd"
OAI_DC_SCHEMA = "http://www.openarchives.org/OAI/2.0/oai_dc.xsd"

GRANULARITY = "YYYY-MM-DDThh:mm:ssZ"
EARLIEST_FALLBACK = "1970-01-01T00:00:00Z"

ET.register_namespace("", OAI_NS)
ET.register_namespace("oai_dc", OAI_DC_NS)
ET.register_namespace("dc", DC_NS)
ET.register_namespace("xsi", XSI_NS)

_VERB_ARGS = {
    "Identify": set(),
    "ListMetadataFormats": {"identifier"},
    "ListIdentifiers": {"metadataPrefix", "from", "until", "set", "resumptionToken"},
    "ListRecords": {"metadataPrefix", "from", "until", "set", "resumptionToken"},
    "GetRecord": {"identifier", "metadataPrefix"},
    "ListSets": {"resumptionToken"},
}

_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")
_DATETIME_RE = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z$")

# Dumb-down map for qualified terms in oai_dc output.
_DCTERMS_PARENT = {
    "dcterms:bibliographicCitation": "identifier",
    "dcterms:hasPart": "relation",
    "dcterms:temporal": "coverage",
}


class _OaiError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def handle(store: CatalogStore, params: dict[str, str], base_url: str) -> bytes:
    """Answer one protocol request; always returns a well-formed document."""
    verb = params.get("verb")
    root = ET.Element(f"{{{OAI_NS}}}OAI-PMH")
    root.set(f"{{{XSI_NS}}}schemaLocation", f"{OAI_NS} {OAI_SCHEMA}")
    stamp = ET.SubElement(root, f"{{{OAI_NS}}}responseDate")
    stamp.text = store.clock().astimezone(datetime.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    request = ET.SubElement(root, f"{{{OAI_NS}}}request")
    request.text = base_url

    try:
        if verb not in _VERB_ARGS:
            raise _OaiError("badVerb", f"unknown or missing verb {verb!r}")
        extras = set(params) - _VERB_ARGS[verb] - {"verb"}
        if extras:
            raise _OaiError("badArgument", f"illegal argument(s): {', '.join(sorted(extras))}")
        request.set("verb", verb)
        for key in sorted(_VERB_ARGS[verb]):
            if key in params and key != "resumptionToken":
                request.set(key, params[key])

        if verb == "Identify":
            _identify(store, root, base_url)
        elif verb == "ListMetadataFormats":
            _list_metadata_formats(store, root, params)
        elif verb == "GetRecord":
            _get_record(store, root, params)
        elif verb in ("ListRecords", "ListIdentifiers"):
            _list(store, root, params, with_metadata=(verb == "ListRecords"))
        elif verb == "ListSets":
            raise _OaiError("noSetHierarchy", "this repository does not organize items into sets")
    except _OaiError as exc:
        error = ET.SubElement(root, f"{{{OAI_NS}}}error")
        error.set("code", exc.code)
        error.text = exc.message

    return ET.tostring(root, encoding="UTF-8", xml_declaration=True)


def _identify(store: CatalogStore, root: ET.Element, base_url: str):
    records = store.oai_records()
    earliest = records[0].datestamp if records else EARLIEST_FALLBACK
    el = ET.SubElement(root, f"{{{OAI_NS}}}Identify")
    for tag, text in (
        ("repositoryName", store.config.repo_id),
        ("baseURL", base_url),
        ("protocolVersion", "2.0"),
        ("adminEmail", store.config.admin_email),
        ("earliestDatestamp", earliest),
        ("deletedRecord", "no"),
        ("granularity", GRANULARITY),
    ):
        child = ET.SubElement(el, f"{{{OAI_NS}}}{tag}")
        child.text = text


def _list_metadata_formats(store: CatalogStore, root: ET.Element, params: dict[str, str]):
    identifier = params.get("identifier")
    if identifier is not None and store.oai_lookup(identifier) is None:
        raise _OaiError("idDoesNotExist", f"unknown identifier {identifier!r}")
    el = ET.SubElement(root, f"{{{OAI_NS}}}ListMetadataFormats")
    fmt = ET.SubElement(el, f"{{{OAI_NS}}}metadataFormat")
    for tag, text in (("metadataPrefix", "oai_dc"), ("schema", OAI_DC_SCHEMA),
                      ("metadataNamespace", OAI_DC_NS)):
        child = ET.SubElement(fmt, f"{{{OAI_NS}}}{tag}")
        child.text = text


def _require_prefix(params: dict[str, str]):
    prefix = params.get("metadataPrefix")
    if prefix is None:
        raise _OaiError("badArgument", "metadataPrefix is required")
    if prefix != "oai_dc":
        raise _OaiError("cannotDisseminateFormat", f"only oai_dc is supported, not {prefix!r}")


def _get_record(store: CatalogStore, root: ET.Element, params: dict[str, str]):
    if "identifier" not in params:
        raise _OaiError("badArgument", "identifier is required")
    _require_prefix(params)
    rec = store.oai_lookup(params["identifier"])
    if rec is None:
        raise _OaiError("idDoesNotExist", f"unknown identifier {params['identifier']!r}")
    el = ET.SubElement(root, f"{{{OAI_NS}}}GetRecord")
    el.append(_record_element(store, rec, with_metadata=True))


def _parse_stamp(value: str, is_until: bool) -> str:
    if _DATETIME_RE.match(value):
        return value
    if _DATE_RE.match(value):
        return value + ("T23:59:59Z" if is_until else "T00:00:00Z")
    raise _OaiError("badArgument", f"bad datestamp {value!r} (granularity {GRANULARITY})")


def _encode_token(payload: dict) -> str:
    raw = json.dumps(payload, sort_keys=True).encode("utf-8")
    return base64.urlsafe_b64encode(raw).decode("ascii")


def _decode_token(token: str) -> dict:
    try:
        payload = json.loads(base64.urlsafe_b64decode(token.encode("ascii")))
        if not isinstance(payload, dict) or not isinstance(payload.get("offset"), int):
            raise ValueError("not a cursor")
        return payload
    except (ValueError, binascii.Error, UnicodeDecodeError):
        raise _OaiError("badResumptionToken", "cannot decode resumption token")


def _list(store: CatalogStore, root: ET.Element, params: dict[str, str], with_metadata: bool):
    token = params.get("resumptionToken")
    if token is not None:
        if len(params) > 2:
            raise _OaiError("badArgument", "resumptionToken is an exclusive argument")
        cursor = _decode_token(token)
        offset = cursor["offset"]
        frm, until = cursor.get("from"), cursor.get("until")
    else:
        _require_prefix(params)
        offset = 0
        frm = _parse_stamp(params["from"], False) if "from" in params else None
        until = _parse_stamp(params["until"], True) if "until" in params else None

    records = store.oai_records()
    if frm is not None:
        records = [r for r in records if r.datestamp >= frm]
    if until is not None:
        records = [r for r in records if r.datestamp <= until]
    if not records:
        raise _OaiError("noRecordsMatch", "no records satisfy the request")

    page_size = store.config.oai_page_size
    page = records[offset:offset + page_size]
    if not page:
        raise _OaiError("badResumptionToken", "cursor is past the end of the list")

    verb = "ListRecords" if with_metadata else "ListIdentifiers"
    el = ET.SubElement(root, f"{{{OAI_NS}}}{verb}")
    for rec in page:
        if with_metadata:
            el.append(_record_element(store, rec, with_metadata=True))
        else:
            el.append(_header_element(rec))

    next_offset = offset + page_size
    if next_offset < len(records):
        tok = ET.SubElement(el, f"{{{OAI_NS}}}resumptionToken")
        tok.set("completeListSize", str(len(records)))
        tok.set("cursor", str(offset))
        tok.text = _encode_token({"offset": next_offset, "from": frm, "until": until})
    elif offset > 0:
        # closing an incomplete-list sequence: empty token, per protocol
        tok = ET.SubElement(el, f"{{{OAI_NS}}}resumptionToken")
        tok.set("completeListSize", str(len(records)))
        tok.set("cursor", str(offset))


def _header_element(rec: OaiRecord) -> ET.Element:
    header = ET.Element(f"{{{OAI_NS}}}header")
    ident = ET.SubElement(header, f"{{{OAI_NS}}}identifier")
    ident.text = rec.identifier
    stamp = ET.SubElement(header, f"{{{OAI_NS}}}datestamp")
    stamp.text = rec.datestamp
    return header


def _record_element(store: CatalogStore, rec: OaiRecord, with_metadata: bool) -> ET.Element:
    record = ET.Element(f"{{{OAI_NS}}}record")
    record.append(_header_element(rec))
    if with_metadata:
        metadata = ET.SubElement(record, f"{{{OAI_NS}}}metadata")
        metadata.append(_oai_dc_payload(store.deposit_for_record(rec)))
    return record


def _oai_dc_payload(deposit) -> ET.Element:
    dc = to_dublin_core(deposit)
    el = ET.Element(f"{{{OAI_DC_NS}}}dc")
    el.set(f"{{{XSI_NS}}}schemaLocation", f"{OAI_DC_NS} {OAI_DC_SCHEMA}")
    for key, values in dc.items():
        if key.startswith("dc:"):
            local = key.split(":", 1)[1]
        else:
            local = _DCTERMS_PARENT.get(key)
            if local is None:
                continue
        for value in values:
            child = ET.SubElement(el, f"{{{DC_NS}}}{local}")
            child.text = value
    return el
