"""Dublin Core crosswalk for validated deposits.

The mapping table (also documented in the README, which the committed
expected-record fixture was derived from by hand):

    title                     -> dc:title
    deposit_creator + object creators (order kept, deduplicated)
                              -> dc:creator
    silent_partners + object contributors (order kept, deduplicated)
                              -> dc:contributor
    subject_terms             -> dc:subject        (label, URI fallback)
    scientific_objectives     -> dc:description
    deposit_date              -> dc:date           (ISO 8601)
    nature_of_resource        -> dc:type
    pid                       -> dc:identifier     (resolver URL, exactly one)
    related_publications      -> dc:relation
    period_terms, place_terms -> dc:coverage       (term URIs, periods first)
    access_policy             -> dc:rights
    archaeological_date_range -> dcterms:temporal  ("<min>/<max>", BCE negative)
    citation                  -> dcterms:bibliographicCitation
    object pids               -> dcterms:hasPart   (resolver URLs)

Qualified terms (dcterms:*) are used where the simple 15 elements fall
short; the OAI layer dumbs them down to their parent elements.
"""

from __future__ import annotations

from ..errors import RepositoryError
from ..identifiers import PersistentIdentifier, resolve_url
from .model import Agent, Deposit

DCRecord = dict[str, list[str]]


class CrosswalkError(RepositoryError):
    pass


def _agent_names(agents: list[Agent]) -> list[str]:
    return [a.name for a in agents if isinstance(a.name, str) and a.name.strip()]


def _dedup(values: list[str]) -> list[str]:
    seen = set()
    out = []
    for v in values:
        if v not in seen:
            seen.add(v)
            out.append(v)
    return out


def to_dublin_core(d: Deposit) -> DCRecord:
    """Crosswalk a validated deposit to a Dublin Core multimap.

    Precondition: validate_deposit(d) is error-free. Raises
    CrosswalkError(UNPUBLISHED) when the deposit has no identifier.
    """
    if not isinstance(d.pid, PersistentIdentifier):
        raise CrosswalkError("UNPUBLISHED", "deposit has no persistent identifier yet")

    creators = _agent_names([d.deposit_creator] if d.deposit_creator else [])
    contributors = _agent_names(d.silent_partners)
    for o in d.objects:
        creators.extend(_agent_names(o.creators))
        contributors.extend(_agent_names(o.contributors))

    record: DCRecord = {}

    def put(key: str, *values: str):
        vals = [v for v in values if v]
        if vals:
            record.setdefault(key, []).extend(vals)

    put("dc:title", d.title)
    put("dc:creator", *_dedup(creators))
    put("dc:contributor", *_dedup(contributors))
    put("dc:subject", *[t.label or t.uri for t in d.subject_terms])
    put("dc:description", d.scientific_objectives)
    put("dc:date", d.deposit_date.isoformat() if d.deposit_date else None)
    put("dc:type", d.nature_of_resource)
    put("dc:identifier", resolve_url(d.pid))
    put("dc:relation", *[p for p in d.related_publications if isinstance(p, str)])
    put("dc:coverage", *[t.uri for t in d.period_terms], *[t.uri for t in d.place_terms])
    put("dc:rights", d.access_policy)
    if d.archaeological_date_range is not None:
        put("dcterms:temporal",
            f"{d.archaeological_date_range.min}/{d.archaeological_date_range.max}")
    put("dcterms:bibliographicCitation", d.citation)
    put("dcterms:hasPart",
        *[resolve_url(o.pid) for o in d.objects if isinstance(o.pid, PersistentIdentifier)])
    return record
