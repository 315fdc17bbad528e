import hashlib
import io
import json
import zipfile
from pathlib import Path

from depot3d.package import verify_package
from depot3d.store import CatalogStore

from conftest import (
    CUBE_PLY_ASCII,
    auth,
    chassenon_draft,
    chassenon_draft_no_files,
    create_remote_deposit,
    make_service,
    push_fixture_deposit,
)


def minimal_draft(title="Untitled") -> dict:
    return {"title": title, "objects": []}


# -- deposit lifecycle ---------------------------------------------------------

def test_sequential_ids_and_round_trip(client):
    assert create_remote_deposit(client, minimal_draft("one")) == 1
    assert create_remote_deposit(client, minimal_draft("two")) == 2
    env = client.get("/api/deposits/1", headers=auth("tok-alice")).json()
    assert env["deposit"]["title"] == "one"
    assert env["deposit"]["status"] == "draft"
    assert env["version"] == 1
    assert env["owner"] == "tok-alice"


def test_posted_draft_round_trips_field_for_field(client):
    draft = chassenon_draft_no_files()
    deposit_id = create_remote_deposit(client, draft)
    stored = client.get(f"/api/deposits/{deposit_id}", headers=auth("tok-alice")).json()["deposit"]
    # server assigns its own id and strips pid/status; everything else survives
    draft["local_id"] = deposit_id
    assert stored == draft


def test_public_token_cannot_create(client):
    response = client.post("/api/deposits", json=minimal_draft())
    assert response.status_code == 403
    assert response.json()["error"] == "UNAUTHORIZED"
    response = client.post("/api/deposits", json=minimal_draft(), headers=auth("nobody"))
    assert response.status_code == 403


def test_structurally_unreadable_draft_rejected(client):
    response = client.post("/api/deposits", json={"objects": "nope"}, headers=auth("tok-alice"))
    assert response.status_code == 400
    assert response.json()["error"] == "VALIDATION"


def test_incomplete_drafts_are_accepted(client):
    deposit_id = create_remote_deposit(client, {"title": None})
    report = client.get(f"/api/deposits/{deposit_id}/report", headers=auth("tok-alice")).json()
    assert not report["ok"]
    assert any(e["code"] == "MISSING" for e in report["errors"])


def test_update_conflict_detection(client):
    deposit_id = create_remote_deposit(client, minimal_draft())
    body = {"deposit": minimal_draft("renamed"), "expected_version": 99}
    response = client.put(f"/api/deposits/{deposit_id}", json=body, headers=auth("tok-alice"))
    assert response.status_code == 409
    assert response.json()["error"] == "CONFLICT"
    body["expected_version"] = 1
    response = client.put(f"/api/deposits/{deposit_id}", json=body, headers=auth("tok-alice"))
    assert response.status_code == 200
    assert response.json()["version"] == 2


def test_owner_isolation_on_drafts(client):
    deposit_id = create_remote_deposit(client, minimal_draft(), token="tok-alice")
    assert client.get(f"/api/deposits/{deposit_id}",
                      headers=auth("tok-bob")).status_code == 403
    assert client.get(f"/api/deposits/{deposit_id}").status_code == 403
    assert client.get(f"/api/deposits/{deposit_id}",
                      headers=auth("tok-cura")).status_code == 200
    response = client.put(f"/api/deposits/{deposit_id}",
                          json={"deposit": minimal_draft()}, headers=auth("tok-bob"))
    assert response.status_code == 403


# -- documents --------------------------------------------------------------------

def setup_object(client, token="tok-alice") -> int:
    return create_remote_deposit(client, chassenon_draft_no_files(), token)


def test_upload_classifies_ply_and_fbx(client):
    deposit_id = setup_object(client)
    response = client.post(f"/api/deposits/{deposit_id}/objects/1/documents",
                           params={"filename": "cube.ply", "media_role": "final-model"},
                           content=CUBE_PLY_ASCII, headers=auth("tok-alice"))
    assert response.status_code == 201
    body = response.json()
    assert body["document"]["format_class"] == "Archivable"
    assert body["document"]["checksum"] == hashlib.sha256(CUBE_PLY_ASCII).hexdigest()
    assert body["verdict"]["detected_format"] == "ply"

    response = client.post(f"/api/deposits/{deposit_id}/objects/1/documents",
                           params={"filename": "scene.fbx"},
                           content=b"\x00binary fbx\x00", headers=auth("tok-alice"))
    assert response.json()["document"]["format_class"] == "DepositOnly"


def test_content_addressing_dedupes_blobs(service):
    app, client, store = service
    deposit_id = setup_object(client)
    for name in ("copy-a.ply", "copy-b.ply"):
        client.post(f"/api/deposits/{deposit_id}/objects/1/documents",
                    params={"filename": name}, content=CUBE_PLY_ASCII,
                    headers=auth("tok-alice"))
    env = client.get(f"/api/deposits/{deposit_id}", headers=auth("tok-alice")).json()
    docs = {d["filename"]: d for d in env["deposit"]["objects"][0]["documents"]}
    key_a = docs["copy-a.ply"]["storage"]["blob_key"]
    key_b = docs["copy-b.ply"]["storage"]["blob_key"]
    assert key_a == key_b
    blob_files = [p for p in store.blobs.root.iterdir() if p.is_file()]
    assert len(blob_files) == 1


def test_upload_to_unknown_object_or_published(client):
    deposit_id = setup_object(client)
    response = client.post(f"/api/deposits/{deposit_id}/objects/9/documents",
                           params={"filename": "x.txt"}, content=b"x",
                           headers=auth("tok-alice"))
    assert response.status_code == 404

    result = push_fixture_deposit(client)
    response = client.post(f"/api/deposits/{result['local_id']}/objects/1/documents",
                           params={"filename": "late.txt"}, content=b"too late",
                           headers=auth("tok-alice"))
    assert response.status_code == 409
    assert response.json()["error"] == "FROZEN"


def test_external_documents(client):
    deposit_id = setup_object(client)
    response = client.post(f"/api/deposits/{deposit_id}/objects/1/documents/external",
                           json={"url": "ftp://example.org/data.zip"},
                           headers=auth("tok-alice"))
    assert response.status_code == 400
    assert response.json()["error"] == "BAD_URL"

    digest = hashlib.sha256(b"remote bytes").hexdigest()
    response = client.post(f"/api/deposits/{deposit_id}/objects/1/documents/external",
                           json={"url": "https://example.org/archive/scan.ply",
                                 "expected_sha256": digest, "media_role": "source-scan"},
                           headers=auth("tok-alice"))
    assert response.status_code == 201
    doc = response.json()["document"]
    assert doc["storage"] == {"kind": "external", "url": "https://example.org/archive/scan.ply"}
    assert doc["filename"] == "scan.ply"


def test_check_links_with_stub_fetcher(service):
    app, client, store = service
    deposit_id = setup_object(client)
    payload = b"remote content"
    digest = hashlib.sha256(payload).hexdigest()
    client.post(f"/api/deposits/{deposit_id}/objects/1/documents/external",
                json={"url": "https://example.org/ok.bin", "expected_sha256": digest},
                headers=auth("tok-alice"))
    client.post(f"/api/deposits/{deposit_id}/objects/1/documents/external",
                json={"url": "https://example.org/gone.bin", "expected_sha256": digest},
                headers=auth("tok-alice"))
    client.post(f"/api/deposits/{deposit_id}/objects/1/documents/external",
                json={"url": "https://example.org/changed.bin", "expected_sha256": digest},
                headers=auth("tok-alice"))

    def stub(url):
        if url.endswith("ok.bin"):
            return 200, payload
        if url.endswith("gone.bin"):
            return 404, None
        return 200, b"different content"

    app.state.fetcher = stub
    report = client.post(f"/api/deposits/{deposit_id}/check-links",
                         headers=auth("tok-alice")).json()
    assert [w["code"] for w in report["warnings"]] == ["LINK_DEAD"]
    assert [e["code"] for e in report["errors"]] == ["LINK_CONTENT_CHANGED"]
    assert "gone.bin" in report["warnings"][0]["message"]


# -- publishing ---------------------------------------------------------------------

def test_publish_mints_one_pid_per_level(client):
    draft = chassenon_draft()
    second = json.loads(json.dumps(draft["objects"][0]))
    second["local_id"] = 2
    second["title"] = "Hypocauste"
    draft["objects"].append(second)
    result = push_fixture_deposit(client, draft=draft)
    assert result["pid"].startswith("10.34969/CND3D/")
    assert result["pid"].count(".d.") == 1
    assert len(result["object_pids"]) == 2
    assert all(".o." in p for p in result["object_pids"])

    env = client.get(f"/api/deposits/{result['local_id']}").json()
    assert env["deposit"]["status"] == "published"
    assert env["deposit"]["pid"] == result["pid"]


def test_publish_twice_fails(client):
    result = push_fixture_deposit(client)
    response = client.post(f"/api/deposits/{result['local_id']}/publish",
                           headers=auth("tok-alice"))
    assert response.status_code == 409
    assert response.json()["error"] == "ALREADY_PUBLISHED"


def test_failed_publish_is_atomic(service):
    app, client, store = service
    deposit_id = create_remote_deposit(client, minimal_draft())  # invalid: no objects etc.
    response = client.post(f"/api/deposits/{deposit_id}/publish", headers=auth("tok-alice"))
    assert response.status_code == 422
    body = response.json()
    assert body["error"] == "VALIDATION_FAILED"
    assert body["report"]["errors"]
    assert len(store.registry) == 0
    env = client.get(f"/api/deposits/{deposit_id}", headers=auth("tok-alice")).json()
    assert env["deposit"]["status"] == "draft"


def test_published_page_carries_resolver_url(client):
    result = push_fixture_deposit(client)
    assert result["pid_url"] == "https://doi.org/" + result["pid"]
    response = client.get(f"/api/search", params={"q": "thermes"})
    hit = response.json()["results"][0]
    assert hit["pid_url"] == result["pid_url"]
    env = client.get(f"/api/deposits/{result['local_id']}").json()
    assert env["pid_url"] == result["pid_url"]


def test_publish_rejects_unresolvable_vocabulary_term(client):
    draft = chassenon_draft_no_files()
    draft["period_terms"][0]["uri"] = "http://n2t.net/ark:/99152/p0nothere"
    deposit_id = create_remote_deposit(client, draft)
    # catalog-only validation is clean, vocabulary-aware publish is not
    response = client.post(f"/api/deposits/{deposit_id}/publish", headers=auth("tok-alice"))
    assert response.status_code == 422
    errors = response.json()["report"]["errors"]
    assert any(e["code"] == "TERM_UNRESOLVED" for e in errors)


def test_new_version_is_curator_only(client):
    result = push_fixture_deposit(client)
    response = client.post(f"/api/deposits/{result['local_id']}/new-version",
                           headers=auth("tok-alice"))
    assert response.status_code == 403
    response = client.post(f"/api/deposits/{result['local_id']}/new-version",
                           headers=auth("tok-cura"))
    assert response.status_code == 200
    new_id = response.json()["local_id"]
    env = client.get(f"/api/deposits/{new_id}", headers=auth("tok-cura")).json()
    assert env["deposit"]["status"] == "draft"
    assert env["deposit"]["pid"] is None
    assert result["pid"] in env["deposit"]["related_publications"]


# -- search and rights -----------------------------------------------------------------

def test_search_finds_fixture_by_word(client):
    push_fixture_deposit(client)
    body = client.get("/api/search", params={"q": "thermes"}).json()
    assert body["total"] == 1
    assert body["results"][0]["title"] == "Les thermes de Chassenon"

    assert client.get("/api/search", params={"q": "amphores"}).json()["total"] == 0


def test_search_filters(client):
    push_fixture_deposit(client)
    assert client.get("/api/search", params={"period": "gallo"}).json()["total"] == 1
    assert client.get("/api/search", params={"period": "neolithique"}).json()["total"] == 0
    assert client.get("/api/search", params={"place": "chassenon"}).json()["total"] == 1
    assert client.get("/api/search", params={"category": "mesh"}).json()["total"] == 1
    assert client.get("/api/search", params={"category": "point-cloud"}).json()["total"] == 0


def test_restricted_deposits_hidden_from_public(client):
    draft = chassenon_draft()
    draft["access_policy"] = "restricted"
    result = push_fixture_deposit(client, draft=draft)

    assert client.get("/api/search", params={"q": "thermes"}).json()["total"] == 0
    assert client.get("/api/search", params={"q": "thermes"},
                      headers=auth("tok-alice")).json()["total"] == 1
    assert client.get("/api/search", params={"q": "thermes"},
                      headers=auth("tok-cura")).json()["total"] == 1
    # direct GET is denied too
    assert client.get(f"/api/deposits/{result['local_id']}").status_code == 403


def test_drafts_never_appear_in_search(client):
    create_remote_deposit(client, chassenon_draft_no_files())
    assert client.get("/api/search", params={"q": "thermes"},
                      headers=auth("tok-alice")).json()["total"] == 0


def test_empty_query_pages_all_visible(client):
    for i in range(5):
        draft = chassenon_draft()
        draft["title"] = f"Deposit {i}"
        push_fixture_deposit(client, draft=draft)
    body = client.get("/api/search", params={"page_size": 2}).json()
    assert body["total"] == 5
    assert len(body["results"]) == 2
    page2 = client.get("/api/search", params={"page_size": 2, "page": 2}).json()
    assert len(page2["results"]) == 2
    assert {r["pid"] for r in body["results"]}.isdisjoint(
        {r["pid"] for r in page2["results"]})


# -- previews, packages, blobs ------------------------------------------------------------

def test_preview_derivative_served(client):
    result = push_fixture_deposit(client)
    response = client.get(f"/api/deposits/{result['local_id']}/objects/1/preview.ply")
    assert response.status_code == 200
    from depot3d.formats import parse_ply
    model = parse_ply(response.content)
    assert model.encoding == "binary_little_endian"
    assert len(model.data["vertex"]) == 8  # cube is tiny, whole point set kept
    assert "1.preview.ply" in response.headers["Content-Disposition"]


def test_document_download(client):
    result = push_fixture_deposit(client)
    response = client.get(
        f"/api/deposits/{result['local_id']}/objects/1/documents/cube.ply")
    assert response.status_code == 200
    assert response.content == CUBE_PLY_ASCII


def test_package_endpoint_streams_verifiable_archive(client, tmp_path):
    result = push_fixture_deposit(client)
    response = client.get(f"/api/deposits/{result['local_id']}/package")
    assert response.status_code == 200
    assert response.headers["content-type"] == "application/zip"
    with zipfile.ZipFile(io.BytesIO(response.content)) as zf:
        zf.extractall(tmp_path)
    root = tmp_path / f"deposit-{result['local_id']}"
    assert verify_package(root).errors == []


def test_package_of_invalid_draft_embeds_report(client):
    deposit_id = create_remote_deposit(client, minimal_draft())
    response = client.get(f"/api/deposits/{deposit_id}/package", headers=auth("tok-alice"))
    assert response.status_code == 422
    assert response.json()["error"] == "VALIDATION_FAILED"


def test_blob_scrub_detects_corruption(service, tmp_path):
    app, client, store = service
    push_fixture_deposit(client)
    assert store.blobs.scrub() == []
    victim = next(p for p in store.blobs.root.iterdir() if p.is_file())
    victim.write_bytes(b"corrupted")
    assert store.blobs.scrub() == [victim.name]


# -- schema + vocab endpoints ---------------------------------------------------------------

def test_schema_endpoint_drives_forms(client):
    schema = client.get("/api/schema").json()
    assert [f["key"] for f in schema["deposit"]][:3] == ["local_id", "pid", "title"]
    labels = [f["label"] for f in schema["deposit"]]
    assert "Scientific and technical objectives" in labels


def test_vocab_endpoints(client):
    body = client.get("/api/vocab/PeriodO/search", params={"q": "gallo"}).json()
    assert body["results"][0]["preferred_label"] == "Gallo-romain"
    uri = body["results"][0]["uri"]
    resolved = client.get("/api/vocab/PeriodO/resolve", params={"uri": uri}).json()
    assert resolved["preferred_label"] == "Gallo-romain"
    assert client.get("/api/vocab/Nope/search", params={"q": "x"}).status_code == 404
    assert client.get("/api/vocab/PeriodO/resolve",
                      params={"uri": "http://nope/"}).status_code == 404


# -- persistence -----------------------------------------------------------------------------

def test_state_survives_restart(tmp_path):
    app, client, store = make_service(tmp_path)
    result = push_fixture_deposit(client)
    draft_id = create_remote_deposit(client, minimal_draft("still a draft"))

    reopened = CatalogStore(store.config, clock=store.clock)
    stored = reopened.get_deposit("tok-alice", result["local_id"])
    assert stored.deposit.status == "published"
    assert stored.deposit.pid.canonical() == result["pid"]
    assert reopened.get_deposit("tok-alice", draft_id).deposit.title == "still a draft"
    assert len(reopened.registry) == len(store.registry)
    assert [r.identifier for r in reopened.oai_records()] == \
        [r.identifier for r in store.oai_records()]
    # preview derivatives survive too
    assert reopened.preview_blob(None, result["local_id"], 1) == \
        store.preview_blob(None, result["local_id"], 1)
