"""Machine-readable description of the three metadata levels.

The descriptor is the single source of truth for field keys, labels,
value kinds and required flags. The validator's MISSING errors, the CLI's
``meta set`` type checks and the webui's generated forms all derive from
it, so adding a field here is enough to surface it everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import (
    ACCESS_POLICY_VALUES,
    FORMAT_CLASS_VALUES,
    KNOWN_CATEGORIES,
    KNOWN_NATURE_OF_RESOURCE,
    MEDIA_ROLE_VALUES,
    NATURE_OF_DEPOSIT_VALUES,
    RELATION_KIND_VALUES,
    STATUS_VALUES,
)


@dataclass(frozen=True)
class FieldDef:
    key: str
    label: str
    kind: str
    required: bool
    enum: tuple[str, ...] | None = None
    open_enum: bool = False
    scheme: str | None = None  # vocabulary lists only

    def to_dict(self) -> dict:
        return {
            "key": self.key,
            "label": self.label,
            "kind": self.kind,
            "required": self.required,
            "enum": list(self.enum) if self.enum is not None else None,
            "open_enum": self.open_enum,
            "scheme": self.scheme,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FieldDef":
        return cls(
            key=d["key"],
            label=d["label"],
            kind=d["kind"],
            required=d["required"],
            enum=tuple(d["enum"]) if d.get("enum") is not None else None,
            open_enum=d.get("open_enum", False),
            scheme=d.get("scheme"),
        )


@dataclass(frozen=True)
class SchemaDescriptor:
    deposit: tuple[FieldDef, ...] = field(default_factory=tuple)
    object: tuple[FieldDef, ...] = field(default_factory=tuple)
    document: tuple[FieldDef, ...] = field(default_factory=tuple)

    def level(self, name: str) -> tuple[FieldDef, ...]:
        return {"deposit": self.deposit, "object": self.object, "document": self.document}[name]

    def field_for(self, level: str, key: str) -> FieldDef | None:
        for f in self.level(level):
            if f.key == key:
                return f
        return None

    def required_keys(self, level: str) -> set[str]:
        return {f.key for f in self.level(level) if f.required}

    def to_dict(self) -> dict:
        return {
            "deposit": [f.to_dict() for f in self.deposit],
            "object": [f.to_dict() for f in self.object],
            "document": [f.to_dict() for f in self.document],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SchemaDescriptor":
        return cls(
            deposit=tuple(FieldDef.from_dict(f) for f in d["deposit"]),
            object=tuple(FieldDef.from_dict(f) for f in d["object"]),
            document=tuple(FieldDef.from_dict(f) for f in d["document"]),
        )


_DEPOSIT_FIELDS = (
    FieldDef("local_id", "Deposit number", "integer", required=True),
    FieldDef("pid", "DOI", "pid", required=False),
    FieldDef("title", "Title", "string", required=True),
    FieldDef("deposit_creator", "Deposit creator", "agent", required=True),
    FieldDef("silent_partners", "Silent Partner", "agent-list", required=False),
    FieldDef("nature_of_resource", "Nature of resource", "enum", required=True,
             enum=KNOWN_NATURE_OF_RESOURCE, open_enum=True),
    FieldDef("nature_of_deposit", "Nature of the deposit", "enum", required=True,
             enum=NATURE_OF_DEPOSIT_VALUES),
    FieldDef("scientific_objectives", "Scientific and technical objectives", "text", required=True),
    FieldDef("deposit_date", "Date of Deposit", "date", required=True),
    FieldDef("project_date_range", "Project date", "year-range", required=True),
    FieldDef("archaeological_date_range", "Archaeological date range", "year-range", required=True),
    FieldDef("period_terms", "Period", "vocab-list", required=False, scheme="PeriodO"),
    FieldDef("place_terms", "Place", "vocab-list", required=False, scheme="Geonames"),
    FieldDef("subject_terms", "Subject", "vocab-list", required=False, scheme="PACTOLS"),
    FieldDef("citation", "Citation", "text", required=True),
    FieldDef("related_publications", "Related publications", "string-list", required=False),
    FieldDef("objects", "Content of Deposit", "object-list", required=False),
    FieldDef("access_policy", "Access policy", "enum", required=False, enum=ACCESS_POLICY_VALUES),
    FieldDef("status", "Status", "enum", required=False, enum=STATUS_VALUES),
)

_OBJECT_FIELDS = (
    FieldDef("local_id", "Object number", "integer", required=True),
    FieldDef("pid", "DOI", "pid", required=False),
    FieldDef("title", "Title", "string", required=True),
    FieldDef("creators", "Creator(s)", "agent-list", required=True),
    FieldDef("contributors", "Contributor(s)", "agent-list", required=False),
    FieldDef("creation_3d_date", "3D date", "date", required=True),
    FieldDef("archaeological_date", "Archaeological date", "year-range", required=True),
    FieldDef("version", "Version", "string", required=True),
    FieldDef("category", "Category", "enum", required=True, enum=KNOWN_CATEGORIES, open_enum=True),
    FieldDef("documents", "Documents", "document-list", required=False),
    FieldDef("final_model", "Final model", "string", required=False),
)

_DOCUMENT_FIELDS = (
    FieldDef("filename", "Filename", "string", required=True),
    FieldDef("media_role", "Media role", "enum", required=True, enum=MEDIA_ROLE_VALUES),
    FieldDef("byte_size", "Size (bytes)", "integer", required=True),
    FieldDef("checksum", "SHA-256 checksum", "checksum", required=True),
    FieldDef("format_class", "Format class", "enum", required=True, enum=FORMAT_CLASS_VALUES),
    FieldDef("storage", "Storage", "storage", required=True),
    FieldDef("relations", "Relations", "relation-list", required=False,
             enum=RELATION_KIND_VALUES),
)

_DESCRIPTOR = SchemaDescriptor(
    deposit=_DEPOSIT_FIELDS,
    object=_OBJECT_FIELDS,
    document=_DOCUMENT_FIELDS,
)


def schema_descriptor() -> SchemaDescriptor:
    """The stable descriptor of all three metadata levels."""
    return _DESCRIPTOR
