"""Catalog core: domain model, metadata schema, validation and Dublin Core export."""

from .model import (
    Agent,
    ArchaeoDateRange,
    DateRange,
    Deposit,
    DocumentRecord,
    DraftShapeError,
    Relation,
    StorageRef,
    VirtualObject,
    VocabularyRef,
    deposit_from_dict,
    deposit_to_dict,
    document_to_dict,
    link_publication,
)
from .schema import FieldDef, SchemaDescriptor, schema_descriptor
from .validation import ReportEntry, ValidationReport, validate_deposit
from .dublincore import CrosswalkError, to_dublin_core

__all__ = [
    "Agent",
    "ArchaeoDateRange",
    "CrosswalkError",
    "DateRange",
    "Deposit",
    "DocumentRecord",
    "DraftShapeError",
    "FieldDef",
    "Relation",
    "ReportEntry",
    "SchemaDescriptor",
    "StorageRef",
    "ValidationReport",
    "VirtualObject",
    "VocabularyRef",
    "deposit_from_dict",
    "deposit_to_dict",
    "document_to_dict",
    "link_publication",
    "schema_descriptor",
    "to_dublin_core",
    "validate_deposit",
]
