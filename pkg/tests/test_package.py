import json
import shutil
import subprocess
from pathlib import Path

import pytest

from depot3d.catalog import deposit_from_dict, deposit_to_dict
from depot3d.package import (
    Manifest,
    PackageError,
    build_package,
    load_package,
    rewrite_storage_to_package,
    verify_package,
)

from conftest import chassenon_draft, fixture_files

DATA = Path(__file__).parent / "data"
FIXED_CREATED = "2021-06-01T12:00:00Z"


def build_fixture(tmp_path, name="pkg"):
    deposit = deposit_from_dict(chassenon_draft())
    return build_package(deposit, fixture_files(), tmp_path / name, created=FIXED_CREATED)


def test_layout_exactly_as_specified(tmp_path):
    built = build_fixture(tmp_path)
    files = sorted(p.relative_to(built.root).as_posix()
                   for p in built.root.rglob("*") if p.is_file())
    assert files == [
        "deposit.json",
        "manifest.json",
        "objects/1/files/cube.ply",
        "objects/1/files/report.pdf",
        "objects/1/object.json",
    ]
    # 2 payload files + deposit.json + object.json listed; manifest lists itself never
    assert [e.path for e in built.manifest.entries] == [
        "deposit.json",
        "objects/1/files/cube.ply",
        "objects/1/files/report.pdf",
        "objects/1/object.json",
    ]


def test_manifest_digests_match_external_checksum_tool(tmp_path):
    built = build_fixture(tmp_path)
    if shutil.which("sha256sum") is None:
        pytest.skip("sha256sum not available")
    for entry in built.manifest.entries:
        out = subprocess.run(["sha256sum", str(built.root / entry.path)],
                             capture_output=True, text=True, check=True)
        assert out.stdout.split()[0] == entry.sha256, entry.path


def test_validation_failure_writes_nothing(tmp_path):
    draft = chassenon_draft()
    del draft["title"]
    deposit = deposit_from_dict(draft)
    out = tmp_path / "pkg"
    with pytest.raises(PackageError) as exc:
        build_package(deposit, fixture_files(), out)
    assert exc.value.code == "VALIDATION_FAILED"
    assert exc.value.report is not None and not exc.value.report.ok
    assert not out.exists()
    assert list(tmp_path.iterdir()) == []  # no staging leftovers either


def test_missing_file_and_digest_mismatch(tmp_path):
    deposit = deposit_from_dict(chassenon_draft())
    files = fixture_files()
    del files["cube.ply"]
    with pytest.raises(PackageError) as exc:
        build_package(deposit, files, tmp_path / "p1")
    assert exc.value.code == "MISSING_FILE"
    assert "cube.ply" in exc.value.message

    files = fixture_files()
    files["cube.ply"] = b"tampered bytes"
    with pytest.raises(PackageError) as exc:
        build_package(deposit, files, tmp_path / "p2")
    assert exc.value.code == "FILE_DIGEST_MISMATCH"


def test_external_documents_are_metadata_only(tmp_path):
    draft = chassenon_draft()
    draft["objects"][0]["documents"].append({
        "filename": "context.pdf",
        "media_role": "report",
        "byte_size": 0,
        "checksum": "0" * 64,
        "format_class": "DepositOnly",
        "storage": {"kind": "external", "url": "https://example.org/context.pdf"},
        "relations": [],
    })
    built = build_package(deposit_from_dict(draft), fixture_files(), tmp_path / "pkg",
                          created=FIXED_CREATED)
    assert not (built.root / "objects/1/files/context.pdf").exists()
    object_json = json.loads((built.root / "objects/1/object.json").read_text("utf-8"))
    external = next(d for d in object_json["documents"] if d["filename"] == "context.pdf")
    assert external["storage"] == {"kind": "external", "url": "https://example.org/context.pdf"}
    assert external["checksum"] == "0" * 64


def test_build_then_verify_passes(tmp_path):
    built = build_fixture(tmp_path)
    report = verify_package(built.root)
    assert report.errors == []
    assert report.warnings == []


def test_every_single_byte_mutation_fails_verify(tmp_path):
    built = build_fixture(tmp_path)
    for entry_path in [e.path for e in built.manifest.entries] + ["manifest.json"]:
        target = built.root / entry_path
        original = target.read_bytes()
        for offset in (0, len(original) // 2, len(original) - 1):
            mutated = bytearray(original)
            mutated[offset] ^= 0x01
            target.write_bytes(bytes(mutated))
            report = verify_package(built.root)
            assert report.errors, f"mutation in {entry_path}@{offset} not caught"
            flagged = {e.path for e in report.errors}
            if entry_path == "manifest.json":
                assert "manifest.json" in flagged or flagged, flagged
            else:
                assert entry_path in flagged, (entry_path, flagged)
            target.write_bytes(original)
    assert verify_package(built.root).errors == []


def test_verify_reports_missing_and_extra_files(tmp_path):
    built = build_fixture(tmp_path)
    (built.root / "objects/1/files/cube.ply").unlink()
    report = verify_package(built.root)
    assert any(e.code == "MISSING_FILE" and e.path == "objects/1/files/cube.ply"
               for e in report.errors)

    built = build_fixture(tmp_path, "pkg2")
    (built.root / "objects/1/files/stray.bin").write_bytes(b"stray")
    report = verify_package(built.root)
    assert report.errors == []
    assert any(w.code == "EXTRA_FILE" and w.path == "objects/1/files/stray.bin"
               for w in report.warnings)


def test_deleted_manifest_is_not_a_package(tmp_path):
    built = build_fixture(tmp_path)
    (built.root / "manifest.json").unlink()
    with pytest.raises(PackageError) as exc:
        verify_package(built.root)
    assert exc.value.code == "NOT_A_PACKAGE"


def test_load_round_trip(tmp_path):
    deposit = deposit_from_dict(chassenon_draft())
    built = build_package(deposit, fixture_files(), tmp_path / "pkg", created=FIXED_CREATED)
    loaded, manifest = load_package(built.root)
    assert manifest.package_digest == built.manifest.package_digest
    assert loaded == rewrite_storage_to_package(deposit)
    assert deposit_to_dict(loaded)["title"] == "Les thermes de Chassenon"
    # the re-ingested deposit revalidates clean
    from depot3d.catalog import validate_deposit
    assert validate_deposit(loaded).errors == []


def test_load_refuses_tampered_metadata(tmp_path):
    built = build_fixture(tmp_path)
    target = built.root / "deposit.json"
    data = bytearray(target.read_bytes())
    data[data.find(b"Chassenon")] ^= 0x20
    target.write_bytes(bytes(data))
    with pytest.raises(PackageError) as exc:
        load_package(built.root)
    assert exc.value.code == "PACKAGE_INVALID"
    assert "deposit.json" in exc.value.message


def test_build_is_deterministic_with_injected_timestamp(tmp_path):
    a = build_fixture(tmp_path, "a")
    b = build_fixture(tmp_path, "b")
    assert a.manifest.package_digest == b.manifest.package_digest
    assert ((tmp_path / "a" / "manifest.json").read_bytes()
            == (tmp_path / "b" / "manifest.json").read_bytes())


def test_refuses_existing_out_dir(tmp_path):
    build_fixture(tmp_path)
    with pytest.raises(PackageError) as exc:
        build_fixture(tmp_path)
    assert exc.value.code == "IO_FAILURE"


def test_committed_fixture_package_loads_identically():
    """Cross-run stability: a package committed to the repo, hashes pinned."""
    root = DATA / "fixture_package"
    pins = json.loads((DATA / "fixture_package_pins.json").read_text("utf-8"))
    assert verify_package(root).errors == []
    loaded, manifest = load_package(root)
    assert manifest.package_digest == pins["package_digest"]
    assert {e.path: e.sha256 for e in manifest.entries} == pins["entries"]
    assert loaded.title == pins["title"]
    assert loaded.pid is None and loaded.status == "draft"


def test_manifest_round_trips_through_dict():
    manifest = Manifest(package_format_version="1", created=FIXED_CREATED)
    assert Manifest.from_dict(manifest.to_dict()) == manifest
