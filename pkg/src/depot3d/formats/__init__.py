"""3D file-format parsing, validation, archivability and preview derivatives."""

from .classify import classify
from .collada import validate_collada
from .decimate import DecimateError, decimate
from .ply import (
    ENCODINGS,
    PlyElement,
    PlyError,
    PlyModel,
    PlyProperty,
    parse_ply,
    write_ply,
)
from .verdict import ARCHIVABLE, DEFAULT_WHITELIST, DEPOSIT_ONLY, FormatVerdict, Issue

__all__ = [
    "ARCHIVABLE",
    "DEFAULT_WHITELIST",
    "DEPOSIT_ONLY",
    "DecimateError",
    "ENCODINGS",
    "FormatVerdict",
    "Issue",
    "PlyElement",
    "PlyError",
    "PlyModel",
    "PlyProperty",
    "classify",
    "decimate",
    "parse_ply",
    "validate_collada",
    "write_ply",
]
