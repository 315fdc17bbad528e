"""DOI-shaped persistent identifiers for deposits and virtual objects.

Canonical form: ``<prefix>/<namespace>/<local_id>.<kind-letter>.<year>``,
e.g. ``10.34969/CND3D/257350.d.2015``. Deposits use the kind letter ``d``,
virtual objects ``o``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import RepositoryError

DEFAULT_PREFIX = "10.34969"
DEFAULT_NAMESPACE = "CND3D"

KIND_DEPOSIT = "deposit"
KIND_OBJECT = "object"

_KIND_TO_LETTER = {KIND_DEPOSIT: "d", KIND_OBJECT: "o"}
_LETTER_TO_KIND = {v: k for k, v in _KIND_TO_LETTER.items()}

_PID_RE = re.compile(r"^(?P<prefix>[^/\s]+)/(?P<ns>[^/\s]+)/(?P<id>\d+)\.(?P<kind>[A-Za-z])\.(?P<year>\d{4})$")


class PidError(RepositoryError):
    pass


@dataclass(frozen=True, order=True)
class PersistentIdentifier:
    local_id: int
    kind: str
    year: int
    prefix: str = DEFAULT_PREFIX
    namespace: str = DEFAULT_NAMESPACE

    def __post_init__(self):
        if self.kind not in _KIND_TO_LETTER:
            raise PidError("MALFORMED", f"unknown identifier kind {self.kind!r}")
        if self.local_id <= 0:
            raise PidError("MALFORMED", f"local id must be positive, got {self.local_id}")
        if not 1000 <= self.year <= 9999:
            raise PidError("MALFORMED", f"year must have four digits, got {self.year}")

    def canonical(self) -> str:
        letter = _KIND_TO_LETTER[self.kind]
        return f"{self.prefix}/{self.namespace}/{self.local_id}.{letter}.{self.year}"

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.canonical()


def parse(s: str) -> PersistentIdentifier:
    """Parse a canonical identifier string into its components.

    Raises PidError(MALFORMED) on wrong segment count, non-numeric id/year
    or unknown kind letter.
    """
    if not isinstance(s, str):
        raise PidError("MALFORMED", "identifier must be a string")
    m = _PID_RE.match(s.strip())
    if m is None:
        raise PidError("MALFORMED", f"not a recognizable identifier: {s!r}")
    kind = _LETTER_TO_KIND.get(m.group("kind"))
    if kind is None:
        raise PidError("MALFORMED", f"unknown kind letter {m.group('kind')!r} in {s!r}")
    local_id = int(m.group("id"))
    if local_id <= 0:
        raise PidError("MALFORMED", f"local id must be positive in {s!r}")
    return PersistentIdentifier(
        local_id=local_id,
        kind=kind,
        year=int(m.group("year")),
        prefix=m.group("prefix"),
        namespace=m.group("ns"),
    )


def resolve_url(pid: PersistentIdentifier) -> str:
    """Resolver URL for display and Dublin Core export."""
    return "https://doi.org/" + pid.canonical()


@dataclass
class PidRegistry:
    """Local mint registry: never hands out the same (kind, local_id) twice.

    Mutations must be serialized by the caller (the catalog store's
    single-writer transaction); reads are safe once loading is done.
    """

    prefix: str = DEFAULT_PREFIX
    namespace: str = DEFAULT_NAMESPACE
    _minted: dict[str, dict[int, PersistentIdentifier]] = field(default_factory=dict)

    def mint(self, kind: str, local_id: int, year: int) -> PersistentIdentifier:
        if kind not in _KIND_TO_LETTER:
            raise PidError("MALFORMED", f"unknown identifier kind {kind!r}")
        by_id = self._minted.setdefault(kind, {})
        if local_id in by_id:
            raise PidError("DUPLICATE_ID", f"{kind} id {local_id} already minted")
        pid = PersistentIdentifier(local_id=local_id, kind=kind, year=year,
                                   prefix=self.prefix, namespace=self.namespace)
        by_id[local_id] = pid
        return pid

    def mint_next(self, kind: str, year: int) -> PersistentIdentifier:
        """Mint with an auto-assigned local id, strictly increasing per kind."""
        by_id = self._minted.get(kind, {})
        next_id = max(by_id, default=0) + 1
        return self.mint(kind, next_id, year)

    def is_minted(self, kind: str, local_id: int) -> bool:
        return local_id in self._minted.get(kind, {})

    def canonical_strings(self) -> list[str]:
        return sorted(p.canonical() for by_id in self._minted.values() for p in by_id.values())

    def __len__(self) -> int:
        return sum(len(v) for v in self._minted.values())
