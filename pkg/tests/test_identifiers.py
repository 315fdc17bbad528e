import pytest
from hypothesis import given, strategies as st

from depot3d.identifiers import (
    PersistentIdentifier,
    PidError,
    PidRegistry,
    parse,
    resolve_url,
)


def test_mint_reproduces_known_deposit_identifiers():
    registry = PidRegistry()
    assert registry.mint("deposit", 257350, 2015).canonical() == "10.34969/CND3D/257350.d.2015"
    assert registry.mint("deposit", 500986, 2021).canonical() == "10.34969/CND3D/500986.d.2021"


def test_object_identifiers_use_o_kind_letter():
    registry = PidRegistry()
    assert registry.mint("object", 500986, 2021).canonical() == "10.34969/CND3D/500986.o.2021"


def test_mint_rejects_duplicates_but_not_across_kinds():
    registry = PidRegistry()
    registry.mint("deposit", 42, 2020)
    with pytest.raises(PidError) as exc:
        registry.mint("deposit", 42, 2021)
    assert exc.value.code == "DUPLICATE_ID"
    registry.mint("object", 42, 2020)  # same numeric id, different kind


def test_parse_components():
    pid = parse("10.34969/CND3D/257350.d.2015")
    assert (pid.prefix, pid.namespace, pid.local_id, pid.kind, pid.year) == \
        ("10.34969", "CND3D", 257350, "deposit", 2015)


@pytest.mark.parametrize("bad", [
    "10.34969/CND3D/257350.x.2015",  # unknown kind letter
    "10.34969/CND3D/257350.d",       # missing year
    "10.34969/257350.d.2015",        # missing namespace
    "10.34969/CND3D/abc.d.2015",     # non-numeric id
    "10.34969/CND3D/257350.d.15",    # two-digit year
    "10.34969/CND3D/0.d.2015",       # zero id
    "",
    "not an identifier at all",
])
def test_parse_rejects_malformed(bad):
    with pytest.raises(PidError) as exc:
        parse(bad)
    assert exc.value.code == "MALFORMED"


def test_resolve_url():
    pid = parse("10.34969/CND3D/257350.d.2015")
    assert resolve_url(pid) == "https://doi.org/10.34969/CND3D/257350.d.2015"
    small = PersistentIdentifier(local_id=1, kind="object", year=2020)
    assert resolve_url(small) == "https://doi.org/10.34969/CND3D/1.o.2020"


def test_resolve_url_contains_canonical_string():
    for s in ("10.34969/CND3D/257350.d.2015", "10.34969/CND3D/500986.o.2021"):
        assert s in resolve_url(parse(s))


pids = st.builds(
    PersistentIdentifier,
    local_id=st.integers(min_value=1, max_value=10**9),
    kind=st.sampled_from(["deposit", "object"]),
    year=st.integers(min_value=1000, max_value=9999),
    prefix=st.sampled_from(["10.34969", "10.5072", "10.12345"]),
    namespace=st.sampled_from(["CND3D", "TEST", "A1"]),
)


@given(pids)
def test_round_trip(pid):
    assert parse(pid.canonical()) == pid


@given(st.text(max_size=40))
def test_parse_is_total(s):
    try:
        pid = parse(s)
    except PidError:
        return
    assert parse(pid.canonical()) == pid


def test_registry_uniqueness_and_monotone_allocation():
    registry = PidRegistry()
    for i in range(1, 51):
        registry.mint("deposit", i, 2020)
    assert len(registry) == 50
    assert len(set(registry.canonical_strings())) == 50

    auto = [registry.mint_next("object", 2021).local_id for _ in range(20)]
    assert auto == sorted(auto)
    assert len(set(auto)) == 20
    # auto allocation keeps increasing past explicitly minted ids
    registry.mint("object", 100, 2021)
    assert registry.mint_next("object", 2021).local_id == 101
