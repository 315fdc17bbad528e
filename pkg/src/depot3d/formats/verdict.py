"""Archivability verdicts shared by the format validators."""

from __future__ import annotations

from dataclasses import dataclass, field

ARCHIVABLE = "Archivable"
DEPOSIT_ONLY = "DepositOnly"

# Default whitelist of formats the long-term facility accepts; the service
# config may override it.
DEFAULT_WHITELIST = ("ply", "dae", "txt", "pdf", "png", "tiff")


@dataclass(frozen=True)
class Issue:
    severity: str  # "error" | "warning" | "info"
    code: str
    message: str

    def to_dict(self) -> dict:
        return {"severity": self.severity, "code": self.code, "message": self.message}


@dataclass
class FormatVerdict:
    format_class: str
    detected_format: str
    issues: list[Issue] = field(default_factory=list)

    @property
    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "error"]

    @classmethod
    def from_issues(cls, detected_format: str, issues: list[Issue]) -> "FormatVerdict":
        has_error = any(i.severity == "error" for i in issues)
        return cls(format_class=DEPOSIT_ONLY if has_error else ARCHIVABLE,
                   detected_format=detected_format, issues=list(issues))

    def deposit_only(self) -> "FormatVerdict":
        self.format_class = DEPOSIT_ONLY
        return self

    def to_dict(self) -> dict:
        return {
            "format_class": self.format_class,
            "detected_format": self.detected_format,
            "issues": [i.to_dict() for i in self.issues],
        }
