"""Shared fixtures: the Chassenon deposit, fixture files, and a service factory."""

from __future__ import annotations

import datetime
import hashlib
import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from depot3d.config import ServiceConfig
from depot3d.catalog import deposit_from_dict
from depot3d.identifiers import parse as parse_pid
from depot3d.service import create_app
from depot3d.store import CatalogStore

DATA_DIR = Path(__file__).parent / "data"

CUBE_PLY_ASCII = b"""ply
format ascii 1.0
comment unit cube test fixture
element vertex 8
property float32 x
property float32 y
property float32 z
element face 12
property list uint8 int32 vertex_indices
end_header
0 0 0
1 0 0
1 1 0
0 1 0
0 0 1
1 0 1
1 1 1
0 1 1
3 0 2 1
3 0 3 2
3 4 5 6
3 4 6 7
3 0 1 5
3 0 5 4
3 2 3 7
3 2 7 6
3 0 4 7
3 0 7 3
3 1 2 6
3 1 6 5
"""

MINIMAL_DAE = b"""<?xml version="1.0" encoding="utf-8"?>
<COLLADA xmlns="http://www.collada.org/2005/11/COLLADASchema" version="1.4.1">
  <asset>
    <created>2015-03-01T12:00:00Z</created>
    <modified>2015-03-01T12:00:00Z</modified>
  </asset>
  <library_geometries>
    <geometry id="box" name="box"/>
  </library_geometries>
  <library_visual_scenes>
    <visual_scene id="scene">
      <node id="boxnode">
        <instance_geometry url="#box"/>
      </node>
    </visual_scene>
  </library_visual_scenes>
  <scene>
    <instance_visual_scene url="#scene"/>
  </scene>
</COLLADA>
"""

MINIMAL_PDF = (b"%PDF-1.4\n1 0 obj\n<< /Type /Catalog >>\nendobj\ntrailer\n"
               b"<< /Root 1 0 R >>\n%%EOF\n")

NOTES_TXT = "Relevé de terrain, campagne 2015.\n".encode("utf-8")


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def fixture_files() -> dict[str, bytes]:
    return {
        "cube.ply": CUBE_PLY_ASCII,
        "report.pdf": MINIMAL_PDF,
        "notes.txt": NOTES_TXT,
        "scene.dae": MINIMAL_DAE,
    }


def chassenon_draft() -> dict:
    """A complete, valid draft modeled on the repository's showcase deposit."""
    files = fixture_files()
    return {
        "local_id": 257350,
        "pid": None,
        "title": "Les thermes de Chassenon",
        "deposit_creator": {"name": "Jeanne Martin", "role_note": None, "org": "Archeovision"},
        "silent_partners": [
            {"name": "Conseil départemental de la Charente", "role_note": "funder", "org": None},
        ],
        "nature_of_resource": "3D",
        "nature_of_deposit": "digitisation",
        "scientific_objectives": "Digitisation of the Gallo-Roman baths of Cassinomagus "
                                 "to document the standing remains and support restoration studies.",
        "deposit_date": "2015-06-12",
        "project_date_range": {"min": 2013, "max": 2015},
        "archaeological_date_range": {"min": 40, "max": 260},
        "period_terms": [
            {"scheme": "PeriodO", "uri": "http://n2t.net/ark:/99152/p0877q3r", "label": "Gallo-romain"},
        ],
        "place_terms": [
            {"scheme": "Geonames", "uri": "https://sws.geonames.org/3025734/", "label": "Chassenon"},
        ],
        "subject_terms": [
            {"scheme": "PACTOLS", "uri": "https://ark.frantiq.fr/ark:/26678/pcrtHljBZmgBVD",
             "label": "thermes"},
        ],
        "citation": "Les thermes de Chassenon, dépôt 257350, "
                    "Conservatoire national des données 3D, 2015.",
        "related_publications": ["hal-01526713"],
        "objects": [
            {
                "local_id": 1,
                "pid": None,
                "title": "Les thermes de Chassenon",
                "creators": [
                    {"name": "Jeanne Martin", "role_note": None, "org": "Archeovision"},
                    {"name": "Paul Bernard", "role_note": "surveyor", "org": None},
                ],
                "contributors": [{"name": "Li Wei", "role_note": None, "org": None}],
                "creation_3d_date": "2015-03-01",
                "archaeological_date": {"min": 40, "max": 260},
                "version": "1.0",
                "category": "mesh",
                "documents": [
                    {
                        "filename": "cube.ply",
                        "media_role": "final-model",
                        "byte_size": len(files["cube.ply"]),
                        "checksum": sha256(files["cube.ply"]),
                        "format_class": "Archivable",
                        "storage": {"kind": "file", "path": "files/cube.ply"},
                        "relations": [],
                    },
                    {
                        "filename": "report.pdf",
                        "media_role": "report",
                        "byte_size": len(files["report.pdf"]),
                        "checksum": sha256(files["report.pdf"]),
                        "format_class": "Archivable",
                        "storage": {"kind": "file", "path": "files/report.pdf"},
                        "relations": [{"relation_kind": "documents", "target": "cube.ply"}],
                    },
                ],
                "final_model": "cube.ply",
            },
        ],
        "access_policy": "public",
        "status": "draft",
    }


def chassenon_draft_no_files() -> dict:
    """The fixture draft with documents stripped, as a push client would POST it."""
    draft = chassenon_draft()
    for obj in draft["objects"]:
        obj["documents"] = []
        obj["final_model"] = None
    return draft


def published_chassenon():
    deposit = deposit_from_dict(chassenon_draft())
    deposit.pid = parse_pid("10.34969/CND3D/257350.d.2015")
    deposit.objects[0].pid = parse_pid("10.34969/CND3D/1.o.2015")
    deposit.status = "published"
    return deposit


class TickingClock:
    """Deterministic UTC clock advancing one second per reading."""

    def __init__(self, start: str = "2021-06-01T12:00:00Z"):
        self.current = datetime.datetime.strptime(start, "%Y-%m-%dT%H:%M:%SZ").replace(
            tzinfo=datetime.timezone.utc)

    def __call__(self) -> datetime.datetime:
        value = self.current
        self.current = value + datetime.timedelta(seconds=1)
        return value


TOKENS = {"tok-alice": "depositor", "tok-bob": "depositor", "tok-cura": "curator"}


def make_service(tmp_path: Path, **config_overrides):
    config = ServiceConfig.from_dict({
        "repo_id": "depot3d.test",
        "data_dir": str(tmp_path / "data"),
        "tokens": dict(TOKENS),
        "oai_page_size": 10,
        **config_overrides,
    })
    clock = TickingClock()
    store = CatalogStore(config, clock=clock)
    app = create_app(config, store=store)
    client = TestClient(app)
    return app, client, store


def auth(token: str | None) -> dict:
    return {"Authorization": f"Bearer {token}"} if token else {}


@pytest.fixture
def service(tmp_path):
    return make_service(tmp_path)


@pytest.fixture
def client(service):
    return service[1]


def create_remote_deposit(client, draft: dict, token: str = "tok-alice") -> int:
    response = client.post("/api/deposits", json=draft, headers=auth(token))
    assert response.status_code == 201, response.text
    return response.json()["local_id"]


def push_fixture_deposit(client, token: str = "tok-alice", publish: bool = True,
                         draft: dict | None = None) -> dict:
    """Create + upload the Chassenon fixture through the HTTP surface."""
    files = fixture_files()
    draft = draft or chassenon_draft()
    stripped = json.loads(json.dumps(draft))
    for obj in stripped["objects"]:
        obj["documents"] = []
        obj["final_model"] = None
    deposit_id = create_remote_deposit(client, stripped, token)
    for obj in draft["objects"]:
        for doc in obj["documents"]:
            response = client.post(
                f"/api/deposits/{deposit_id}/objects/{obj['local_id']}/documents",
                params={"filename": doc["filename"], "media_role": doc["media_role"]},
                content=files[doc["filename"]],
                headers=auth(token))
            assert response.status_code == 201, response.text
    envelope = client.get(f"/api/deposits/{deposit_id}", headers=auth(token)).json()
    merged = envelope["deposit"]
    for obj, local_obj in zip(merged["objects"], draft["objects"]):
        obj["final_model"] = local_obj.get("final_model")
        for doc in obj["documents"]:
            local_doc = next(d for d in local_obj["documents"]
                             if d["filename"] == doc["filename"])
            doc["relations"] = local_doc.get("relations", [])
    response = client.put(f"/api/deposits/{deposit_id}",
                          json={"deposit": merged, "expected_version": envelope["version"]},
                          headers=auth(token))
    assert response.status_code == 200, response.text
    result = {"local_id": deposit_id}
    if publish:
        response = client.post(f"/api/deposits/{deposit_id}/publish", headers=auth(token))
        assert response.status_code == 200, response.text
        result.update(response.json())
    return result
