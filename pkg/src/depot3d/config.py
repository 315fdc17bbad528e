"""Service configuration: one JSON file, sensible defaults everywhere."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import RepositoryError
from .formats import DEFAULT_WHITELIST
from .identifiers import DEFAULT_NAMESPACE, DEFAULT_PREFIX

ROLES = ("public", "depositor", "curator")
_ROLE_RANK = {role: i for i, role in enumerate(ROLES)}


def role_rank(role: str) -> int:
    return _ROLE_RANK.get(role, 0)


@dataclass
class ServiceConfig:
    listen: str = "127.0.0.1:8734"
    repo_id: str = "depot3d.local"
    admin_email: str = "admin@example.org"
    data_dir: str = "data"
    pid_prefix: str = DEFAULT_PREFIX
    pid_namespace: str = DEFAULT_NAMESPACE
    tokens: dict[str, str] = field(default_factory=dict)  # token -> role
    archivable_whitelist: tuple[str, ...] = DEFAULT_WHITELIST
    oai_page_size: int = 10
    search_page_size: int = 10
    preview_point_budget: int = 20000
    ui_dir: str | None = None

    @property
    def host(self) -> str:
        return self.listen.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.listen.rsplit(":", 1)[1])

    @classmethod
    def from_file(cls, path: str | Path) -> "ServiceConfig":
        try:
            raw = json.loads(Path(path).read_text("utf-8"))
        except (OSError, ValueError) as exc:
            raise RepositoryError("CONFIG_INVALID", f"cannot read config {path}: {exc}")
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "ServiceConfig":
        cfg = cls()
        for key in ("listen", "repo_id", "admin_email", "data_dir", "pid_prefix",
                    "pid_namespace", "oai_page_size", "search_page_size",
                    "preview_point_budget", "ui_dir"):
            if key in raw:
                setattr(cfg, key, raw[key])
        if "archivable_whitelist" in raw:
            cfg.archivable_whitelist = tuple(raw["archivable_whitelist"])
        tokens = raw.get("tokens", {})
        for token, role in tokens.items():
            if role not in ROLES:
                raise RepositoryError("CONFIG_INVALID", f"unknown role {role!r} for a token")
        cfg.tokens = dict(tokens)
        return cfg
