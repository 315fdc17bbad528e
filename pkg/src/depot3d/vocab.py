"""Controlled-vocabulary lookups over bundled offline fixtures.

PeriodO, Geonames and PACTOLS samples ship with the package as
line-oriented JSON (one object per line, keys: scheme, uri,
preferred_label, alt_labels, bounds, coords). Live adapters for the
upstream services would return a superset of this format and can be
added behind the same store operations later.

Matching is accent-insensitive: the French thesauri make "Néolithique"
and "neolithique" the same query.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass
from importlib import resources

from .errors import RepositoryError

SCHEMES = ("PeriodO", "Geonames", "PACTOLS")

_BUNDLED_FILES = {
    "PeriodO": "periodo.jsonl",
    "Geonames": "geonames.jsonl",
    "PACTOLS": "pactols.jsonl",
}


class VocabError(RepositoryError):
    pass


def normalize_label(s: str) -> str:
    """Case-fold and strip diacritics; idempotent."""
    decomposed = unicodedata.normalize("NFD", s.casefold())
    stripped = "".join(c for c in decomposed if not unicodedata.combining(c))
    return unicodedata.normalize("NFC", stripped)


@dataclass(frozen=True)
class VocabularyEntry:
    scheme: str
    uri: str
    preferred_label: str
    alt_labels: tuple[str, ...] = ()
    bounds: tuple[int, int] | None = None  # PeriodO: (min year, max year)
    coords: tuple[float, float] | None = None  # Geonames: (lat, lon)

    def labels(self) -> tuple[str, ...]:
        return (self.preferred_label, *self.alt_labels)

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "uri": self.uri,
            "preferred_label": self.preferred_label,
            "alt_labels": list(self.alt_labels),
            "bounds": list(self.bounds) if self.bounds else None,
            "coords": list(self.coords) if self.coords else None,
        }


def _parse_line(scheme: str, lineno: int, line: str) -> VocabularyEntry:
    def fail(reason: str):
        raise VocabError("FIXTURE_PARSE", f"line {lineno}: {reason}")

    try:
        obj = json.loads(line)
    except ValueError as exc:
        fail(f"invalid JSON ({exc})")
    if not isinstance(obj, dict):
        fail("expected a JSON object")
    if obj.get("scheme") != scheme:
        fail(f"scheme {obj.get('scheme')!r} does not match {scheme!r}")
    uri = obj.get("uri")
    if not isinstance(uri, str) or "://" not in uri and not uri.startswith("ark:"):
        fail(f"uri must be absolute, got {uri!r}")
    label = obj.get("preferred_label")
    if not isinstance(label, str) or not label.strip():
        fail("preferred_label must be non-empty")
    alt = obj.get("alt_labels") or []
    if not isinstance(alt, list) or not all(isinstance(a, str) for a in alt):
        fail("alt_labels must be a list of strings")
    bounds = obj.get("bounds")
    if bounds is not None:
        if (not isinstance(bounds, list) or len(bounds) != 2
                or not all(isinstance(b, int) for b in bounds)):
            fail("bounds must be [min_year, max_year]")
        if bounds[0] > bounds[1]:
            fail(f"bounds inverted: {bounds[0]} > {bounds[1]}")
    coords = obj.get("coords")
    if coords is not None:
        if (not isinstance(coords, list) or len(coords) != 2
                or not all(isinstance(c, (int, float)) for c in coords)):
            fail("coords must be [lat, lon]")
        lat, lon = coords
        if not -90 <= lat <= 90 or not -180 <= lon <= 180:
            fail(f"coordinates out of range: {coords}")
    return VocabularyEntry(
        scheme=scheme,
        uri=uri,
        preferred_label=label,
        alt_labels=tuple(alt),
        bounds=tuple(bounds) if bounds else None,
        coords=tuple(coords) if coords else None,
    )


class VocabularyStore:
    """Load-once, read-many term index. Loading is a startup step; after
    that every lookup is read-only and safe to share across requests."""

    def __init__(self):
        self._by_uri: dict[str, dict[str, VocabularyEntry]] = {}

    def load_fixture(self, scheme: str, data: bytes) -> int:
        """Load one fixture; all-or-nothing per call. Returns entries added."""
        existing = self._by_uri.get(scheme, {})
        batch: dict[str, VocabularyEntry] = {}
        for lineno, line in enumerate(data.decode("utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            entry = _parse_line(scheme, lineno, line)
            if entry.uri in batch or entry.uri in existing:
                raise VocabError("FIXTURE_PARSE", f"line {lineno}: duplicate uri {entry.uri}")
            batch[entry.uri] = entry
        self._by_uri.setdefault(scheme, {}).update(batch)
        return len(batch)

    def load_bundled(self) -> dict[str, int]:
        counts = {}
        for scheme, filename in _BUNDLED_FILES.items():
            data = resources.files("depot3d").joinpath("vocabdata", filename).read_bytes()
            counts[scheme] = self.load_fixture(scheme, data)
        return counts

    def is_loaded(self, scheme: str) -> bool:
        return scheme in self._by_uri

    def contains(self, scheme: str, uri: str) -> bool:
        return uri in self._by_uri.get(scheme, {})

    def schemes(self) -> list[str]:
        return sorted(self._by_uri)

    def entries(self, scheme: str) -> list[VocabularyEntry]:
        return list(self._by_uri.get(scheme, {}).values())

    def resolve(self, scheme: str, uri: str) -> VocabularyEntry:
        if scheme not in self._by_uri:
            raise VocabError("UNKNOWN_SCHEME", f"no fixture loaded for scheme {scheme!r}")
        entry = self._by_uri[scheme].get(uri)
        if entry is None:
            raise VocabError("NOT_FOUND", f"{uri} not in the {scheme} vocabulary")
        return entry

    def search(self, scheme: str, query: str, limit: int = 10) -> list[VocabularyEntry]:
        """Ranked lookup: exact normalized-label matches, then prefix
        matches, then substring matches; ties broken by uri."""
        if scheme not in self._by_uri:
            raise VocabError("UNKNOWN_SCHEME", f"no fixture loaded for scheme {scheme!r}")
        q = normalize_label(query).strip()
        if not q or limit <= 0:
            return []
        ranked: list[tuple[int, str]] = []
        for entry in self._by_uri[scheme].values():
            labels = [normalize_label(l) for l in entry.labels()]
            if any(l == q for l in labels):
                rank = 0
            elif any(l.startswith(q) for l in labels):
                rank = 1
            elif any(q in l for l in labels):
                rank = 2
            else:
                continue
            ranked.append((rank, entry.uri))
        ranked.sort()
        return [self._by_uri[scheme][uri] for _, uri in ranked[:limit]]
