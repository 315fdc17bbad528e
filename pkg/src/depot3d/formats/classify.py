"""Archivability gate: sniff content, dispatch to validators, apply the whitelist.

Strong magic-byte sniffs (PLY, COLLADA, PDF, PNG, TIFF) override the file
extension with a warning; weak sniffs (generic XML, UTF-8 text) only label
what was found and never make an unknown format archivable.
"""

from __future__ import annotations

from .collada import validate_collada
from .ply import PlyError, parse_ply
from .verdict import ARCHIVABLE, DEFAULT_WHITELIST, DEPOSIT_ONLY, FormatVerdict, Issue

_EXTENSION_MAP = {
    "ply": "ply",
    "dae": "dae",
    "txt": "txt",
    "text": "txt",
    "pdf": "pdf",
    "png": "png",
    "tif": "tiff",
    "tiff": "tiff",
}

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _extension(filename: str) -> str:
    if "." not in filename:
        return ""
    return filename.rsplit(".", 1)[1].lower()


def _sniff_strong(data: bytes) -> str | None:
    if data[:3] == b"ply" and (len(data) == 3 or data[3:4] in (b"\n", b"\r")):
        return "ply"
    if data.startswith(b"%PDF-"):
        return "pdf"
    if data.startswith(_PNG_MAGIC):
        return "png"
    if data[:4] in (b"II*\x00", b"MM\x00*"):
        return "tiff"
    if _looks_like_xml(data):
        head = data[:4096]
        if b"<COLLADA" in head:
            return "dae"
    return None


def _looks_like_xml(data: bytes) -> bool:
    stripped = data.lstrip(b"\xef\xbb\xbf \t\r\n")
    return stripped.startswith(b"<?xml") or stripped.startswith(b"<")


def _is_utf8_text(data: bytes) -> bool:
    if b"\x00" in data:
        return False
    try:
        data.decode("utf-8")
        return True
    except UnicodeDecodeError:
        return False


def _sniff_weak(data: bytes) -> str | None:
    if _looks_like_xml(data) and _is_utf8_text(data):
        return "xml"
    if data and _is_utf8_text(data):
        return "txt"
    return None


def _verdict_for_ply(data: bytes) -> FormatVerdict:
    issues: list[Issue] = []
    try:
        model = parse_ply(data)
    except PlyError as exc:
        issues.append(Issue("error", exc.code, exc.message))
        return FormatVerdict.from_issues("ply", issues)
    if model.trailing_bytes:
        issues.append(Issue("warning", "PLY_TRAILING_BYTES",
                            f"{model.trailing_bytes} bytes after the declared payload"))
    return FormatVerdict.from_issues("ply", issues)


def classify(filename: str, data: bytes,
             whitelist: tuple[str, ...] = DEFAULT_WHITELIST) -> FormatVerdict:
    """Decide whether a file may go to the long-term archive.

    Never raises: problems are issues on the verdict, and a verdict is
    Archivable only when no error-severity issue is present and the
    detected format is on the whitelist.
    """
    ext = _extension(filename)
    ext_format = _EXTENSION_MAP.get(ext)
    sniffed = _sniff_strong(data)

    issues: list[Issue] = []
    if sniffed is not None:
        if ext_format != sniffed:
            issues.append(Issue("warning", "EXTENSION_MISMATCH",
                                f"extension {ext or '(none)'!r} but content is {sniffed}"))
        effective = sniffed
    elif ext_format is not None:
        effective = ext_format
    else:
        weak = _sniff_weak(data)
        detected = ext or weak or "unknown"
        issues.append(Issue("info", "DETECTED_NONSTANDARD",
                            f"{detected!r} is not a standard archival format"))
        return FormatVerdict(format_class=DEPOSIT_ONLY, detected_format=detected, issues=issues)

    if effective == "ply":
        verdict = _verdict_for_ply(data)
    elif effective == "dae":
        verdict = validate_collada(data)
    elif effective == "txt":
        if _is_utf8_text(data):
            verdict = FormatVerdict(ARCHIVABLE, "txt")
        else:
            verdict = FormatVerdict(DEPOSIT_ONLY, "txt",
                                    [Issue("error", "TEXT_NOT_UTF8", "not valid UTF-8 text")])
    elif effective in ("pdf", "png", "tiff"):
        if sniffed == effective:
            verdict = FormatVerdict(ARCHIVABLE, effective)
        else:
            verdict = FormatVerdict(DEPOSIT_ONLY, effective,
                                    [Issue("error", "MAGIC_MISMATCH",
                                           f"content does not carry the {effective} signature")])
    else:  # pragma: no cover - dispatch is exhaustive
        verdict = FormatVerdict(DEPOSIT_ONLY, effective)

    verdict.issues = issues + verdict.issues
    if verdict.errors:
        verdict.format_class = DEPOSIT_ONLY
    elif effective not in whitelist:
        verdict.issues.append(Issue("info", "NOT_WHITELISTED",
                                    f"{effective!r} is not on the archivable whitelist"))
        verdict.format_class = DEPOSIT_ONLY
    return verdict
