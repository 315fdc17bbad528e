"""Structural COLLADA (.dae) checks for the archival gate.

Deliberately not full schema validation: the gate needs deterministic,
dependency-light checks — XML well-formedness, the COLLADA 1.4.1 root,
the mandatory asset child, and that url/source fragment references
resolve inside the document.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .verdict import FormatVerdict, Issue

COLLADA_VERSION = "1.4.1"
_REF_ATTRIBUTES = ("url", "source", "target")


def _local_name(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def validate_collada(data: bytes) -> FormatVerdict:
    issues: list[Issue] = []
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        issues.append(Issue("error", "DAE_NOT_XML", f"not well-formed XML: {exc}"))
        return FormatVerdict.from_issues("dae", issues)

    if _local_name(root.tag) != "COLLADA":
        issues.append(Issue("error", "DAE_BAD_ROOT",
                            f"root element is {_local_name(root.tag)!r}, expected COLLADA"))
        return FormatVerdict.from_issues("dae", issues)

    version = root.get("version")
    if version != COLLADA_VERSION:
        issues.append(Issue("error", "DAE_BAD_VERSION",
                            f"version {version!r}, expected {COLLADA_VERSION!r}"))

    if not any(_local_name(child.tag) == "asset" for child in root):
        issues.append(Issue("error", "DAE_NO_ASSET", "mandatory asset element is missing"))

    ids = {el.get("id") for el in root.iter() if el.get("id") is not None}
    for el in root.iter():
        for attr in _REF_ATTRIBUTES:
            value = el.get(attr)
            if value is None or not value.startswith("#"):
                continue
            fragment = value[1:]
            if fragment not in ids:
                issues.append(Issue("error", "DAE_BROKEN_REF",
                                    f"<{_local_name(el.tag)} {attr}=\"{value}\"> resolves nowhere"))

    return FormatVerdict.from_issues("dae", issues)
