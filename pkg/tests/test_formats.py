"""COLLADA validation, the classification gate, and decimation."""

import random

import pytest

from depot3d.formats import (
    ARCHIVABLE,
    DEPOSIT_ONLY,
    DecimateError,
    classify,
    decimate,
    parse_ply,
    validate_collada,
    write_ply,
)

from _plygen import random_point_cloud
from conftest import CUBE_PLY_ASCII, MINIMAL_DAE, MINIMAL_PDF


# -- COLLADA ------------------------------------------------------------------

def test_minimal_collada_is_archivable():
    verdict = validate_collada(MINIMAL_DAE)
    assert verdict.format_class == ARCHIVABLE
    assert verdict.errors == []


def test_collada_missing_asset():
    doc = MINIMAL_DAE.replace(
        b"<asset>\n    <created>2015-03-01T12:00:00Z</created>\n"
        b"    <modified>2015-03-01T12:00:00Z</modified>\n  </asset>", b"")
    verdict = validate_collada(doc)
    assert verdict.format_class == DEPOSIT_ONLY
    assert any(i.code == "DAE_NO_ASSET" for i in verdict.errors)


def test_collada_not_xml():
    verdict = validate_collada(b"\x00\x01 garbage")
    assert verdict.format_class == DEPOSIT_ONLY
    assert any(i.code == "DAE_NOT_XML" for i in verdict.errors)


def test_collada_wrong_version_and_root():
    verdict = validate_collada(MINIMAL_DAE.replace(b'version="1.4.1"', b'version="1.5.0"'))
    assert any(i.code == "DAE_BAD_VERSION" for i in verdict.errors)

    verdict = validate_collada(b"<scene><asset/></scene>")
    assert any(i.code == "DAE_BAD_ROOT" for i in verdict.errors)


def test_collada_broken_fragment_reference():
    doc = MINIMAL_DAE.replace(b'url="#box"', b'url="#missing-geometry"')
    verdict = validate_collada(doc)
    assert verdict.format_class == DEPOSIT_ONLY
    assert any(i.code == "DAE_BROKEN_REF" and "missing-geometry" in i.message
               for i in verdict.errors)


# -- classification gate ----------------------------------------------------------

def test_classification_table():
    assert classify("statue.ply", CUBE_PLY_ASCII).format_class == ARCHIVABLE
    assert classify("scene.dae", MINIMAL_DAE).format_class == ARCHIVABLE
    assert classify("report.pdf", MINIMAL_PDF).format_class == ARCHIVABLE
    assert classify("notes.txt", "des notes en français\n".encode()).format_class == ARCHIVABLE

    assert classify("scene.fbx", b"Kaydara FBX Binary\x20\x20\x00").format_class == DEPOSIT_ONLY
    assert classify("model.gltf", b'{"asset": {"version": "2.0"}}').format_class == DEPOSIT_ONLY
    assert classify("mesh.obj", b"v 0 0 0\nv 1 0 0\nf 1 2 1\n").format_class == DEPOSIT_ONLY
    assert classify("mystery.bin", b"\x00\x01\x02").format_class == DEPOSIT_ONLY
    assert classify("no-extension", b"plain text").format_class == DEPOSIT_ONLY


def test_nonstandard_text_formats_stay_deposit_only():
    # OBJ and glTF are text; the weak text sniff must not make them archivable
    verdict = classify("mesh.obj", b"v 0 0 0\n")
    assert verdict.format_class == DEPOSIT_ONLY
    assert any(i.code == "DETECTED_NONSTANDARD" for i in verdict.issues)
    assert verdict.detected_format == "obj"


def test_sniff_overrides_extension_with_warning():
    verdict = classify("mesh.ply", MINIMAL_DAE)
    assert verdict.detected_format == "dae"
    assert any(i.code == "EXTENSION_MISMATCH" and i.severity == "warning"
               for i in verdict.issues)
    assert verdict.format_class == ARCHIVABLE  # the COLLADA content is valid

    verdict = classify("scan.dat", MINIMAL_PDF)
    assert verdict.detected_format == "pdf"
    assert any(i.code == "EXTENSION_MISMATCH" for i in verdict.issues)


def test_corrupt_content_for_known_extension():
    verdict = classify("broken.ply", b"not a ply at all")
    assert verdict.format_class == DEPOSIT_ONLY
    assert any(i.code == "PLY_BAD_MAGIC" for i in verdict.errors)

    verdict = classify("image.png", b"GIF89a...")
    assert verdict.format_class == DEPOSIT_ONLY
    assert any(i.code == "MAGIC_MISMATCH" for i in verdict.errors)

    verdict = classify("latin.txt", b"caf\xe9")  # latin-1, not utf-8
    assert verdict.format_class == DEPOSIT_ONLY
    assert any(i.code == "TEXT_NOT_UTF8" for i in verdict.errors)


def test_truncated_ply_is_deposit_only_with_issue():
    truncated = CUBE_PLY_ASCII[:-20]
    verdict = classify("cube.ply", truncated)
    assert verdict.format_class == DEPOSIT_ONLY
    assert any(i.code == "PLY_TRUNCATED" for i in verdict.errors)


def test_whitelist_is_configurable():
    verdict = classify("statue.ply", CUBE_PLY_ASCII, whitelist=("dae", "pdf"))
    assert verdict.format_class == DEPOSIT_ONLY
    assert any(i.code == "NOT_WHITELISTED" for i in verdict.issues)
    assert verdict.errors == []


def test_archivable_never_carries_errors():
    samples = [
        ("a.ply", CUBE_PLY_ASCII), ("b.dae", MINIMAL_DAE), ("c.pdf", MINIMAL_PDF),
        ("d.txt", b"ok"), ("e.fbx", b"\x00"), ("f.ply", b"junk"),
        ("g.png", b"\x89PNG\r\n\x1a\n" + b"\x00" * 8), ("h.tiff", b"II*\x00rest"),
    ]
    rng = random.Random(7)
    for i in range(50):
        samples.append((f"fuzz{i}.ply", bytes(rng.randrange(256) for _ in range(rng.randrange(80)))))
    for name, data in samples:
        verdict = classify(name, data)
        if verdict.format_class == ARCHIVABLE:
            assert verdict.errors == [], (name, verdict.issues)


# -- decimation --------------------------------------------------------------------

def test_decimate_count_law_and_subset():
    rng = random.Random(13)
    cloud = random_point_cloud(rng, 1000)
    sampled = decimate(cloud, 100, seed=7)
    assert len(sampled.data["vertex"]) == 100
    members = set(cloud.data["vertex"])
    assert all(v in members for v in sampled.data["vertex"])


def test_decimate_identity_when_target_exceeds_count():
    rng = random.Random(5)
    cloud = random_point_cloud(rng, 1000)
    sampled = decimate(cloud, 5000, seed=1)
    assert sampled.data["vertex"] == cloud.data["vertex"]


def test_decimate_deterministic_per_seed():
    rng = random.Random(21)
    cloud = random_point_cloud(rng, 500)
    a = write_ply(decimate(cloud, 50, seed=7), "binary_little_endian")
    b = write_ply(decimate(cloud, 50, seed=7), "binary_little_endian")
    assert a == b
    c = write_ply(decimate(cloud, 50, seed=8), "binary_little_endian")
    assert a != c  # overwhelmingly likely for 500 distinct points


def test_decimate_drops_faces():
    model = parse_ply(CUBE_PLY_ASCII)
    sampled = decimate(model, 4, seed=0)
    assert [e.name for e in sampled.elements] == ["vertex"]
    assert "face" not in sampled.data
    assert len(sampled.data["vertex"]) == 4


def test_decimate_errors():
    model = parse_ply(CUBE_PLY_ASCII)
    with pytest.raises(DecimateError) as exc:
        decimate(model, 0, seed=1)
    assert exc.value.code == "TARGET_ZERO"

    no_vertex = parse_ply(b"ply\nformat ascii 1.0\nelement point 0\nproperty float32 x\nend_header\n")
    with pytest.raises(DecimateError) as exc:
        decimate(no_vertex, 10, seed=1)
    assert exc.value.code == "NO_VERTEX_ELEMENT"
