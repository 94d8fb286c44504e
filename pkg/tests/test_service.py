"""HTTP API contract: resource lifecycle, version tags, perspectives,
diagram endpoints, and error mapping."""

from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from timeflow.service import create_app
from timeflow.store import Repository

from conftest import GOLDEN_MANIFEST


@pytest.fixture
def client(tmp_path):
    return TestClient(create_app(Repository(tmp_path)))


@pytest.fixture
def extracted(client):
    """Register the bundled corpus and run an extract; returns (client, id, etag)."""
    response = client.post("/corpora", json={"path": str(GOLDEN_MANIFEST)})
    assert response.status_code == 201
    corpus_id = response.json()["id"]
    response = client.post(f"/corpora/{corpus_id}/extract")
    assert response.status_code == 201
    return client, corpus_id, response.headers["ETag"]


class TestCorpora:
    def test_register_and_list(self, client):
        response = client.post("/corpora", json={"path": str(GOLDEN_MANIFEST)})
        assert response.status_code == 201
        assert response.headers["ETag"]
        assert response.json()["id"] in client.get("/corpora").json()["corpora"]

    def test_body_without_path_rejected(self, client):
        assert client.post("/corpora", json={"nope": 1}).status_code == 422

    def test_bad_manifest_path_rejected(self, client):
        assert client.post("/corpora", json={"path": "/does/not/exist.json"}).status_code == 422

    def test_extract_unknown_corpus_404(self, client):
        assert client.post("/corpora/ghost/extract").status_code == 404


class TestChronologies:
    def test_get_returns_document_and_etag(self, extracted):
        client, corpus_id, etag = extracted
        response = client.get(f"/chronologies/{corpus_id}")
        assert response.status_code == 200
        assert response.headers["ETag"] == etag
        document = response.json()
        assert len([c for c in document["concepts"] if c["variant"] == "event"]) == 9
        assert len(document["relations"]) == 228

    def test_put_with_current_tag_succeeds(self, extracted):
        client, corpus_id, etag = extracted
        document = client.get(f"/chronologies/{corpus_id}").json()
        response = client.put(
            f"/chronologies/{corpus_id}", json=document, headers={"If-Match": etag}
        )
        assert response.status_code == 200

    def test_put_with_stale_tag_conflicts(self, extracted):
        client, corpus_id, _ = extracted
        document = client.get(f"/chronologies/{corpus_id}").json()
        response = client.put(
            f"/chronologies/{corpus_id}", json=document, headers={"If-Match": "stale"}
        )
        assert response.status_code == 409

    def test_put_invalid_chronology_is_422_with_violations(self, extracted):
        client, corpus_id, etag = extracted
        document = client.get(f"/chronologies/{corpus_id}").json()
        document["relations"][0]["from"] = "no-such-node"
        response = client.put(
            f"/chronologies/{corpus_id}", json=document, headers={"If-Match": etag}
        )
        assert response.status_code == 422
        assert any(v["rule"] == "endpoint-resolves" for v in response.json()["violations"])

    def test_unknown_chronology_404(self, client):
        assert client.get("/chronologies/ghost").status_code == 404


class TestMergeAndUndo:
    def test_merge_then_put_back_restores(self, extracted):
        client, corpus_id, etag = extracted
        before = client.get(f"/chronologies/{corpus_id}").json()
        response = client.post(
            f"/chronologies/{corpus_id}/merge",
            json={"event_ids": ["ev-palmen-shares", "ev-email-forwarded"]},
        )
        assert response.status_code == 200
        assert response.json()["previous_tag"] == etag
        merged = client.get(f"/chronologies/{corpus_id}").json()
        assert len([c for c in merged["concepts"] if c["variant"] == "event"]) == 8
        # undo: write the pre-merge document back under the merge's tag
        undo = client.put(
            f"/chronologies/{corpus_id}",
            json=before,
            headers={"If-Match": response.headers["ETag"]},
        )
        assert undo.status_code == 200
        assert undo.headers["ETag"] == etag
        restored = client.get(f"/chronologies/{corpus_id}").json()
        assert len([c for c in restored["concepts"] if c["variant"] == "event"]) == 9

    def test_merge_with_stale_tag_conflicts(self, extracted):
        client, corpus_id, _ = extracted
        response = client.post(
            f"/chronologies/{corpus_id}/merge",
            json={"event_ids": ["ev-act", "ev-bulgarian-fraud"]},
            headers={"If-Match": "stale"},
        )
        assert response.status_code == 409


class TestPerspectivesAndDiagrams:
    def test_svg_and_json_formats(self, extracted):
        client, corpus_id, _ = extracted
        svg = client.get(f"/chronologies/{corpus_id}/timeflow?format=svg")
        assert svg.status_code == 200
        assert svg.headers["content-type"].startswith("image/svg+xml")
        assert svg.text.startswith("<svg")
        data = client.get(f"/chronologies/{corpus_id}/timeflow").json()
        assert {"layout", "style", "relations"} <= set(data)

    def test_perspective_filters_the_diagram(self, extracted):
        client, corpus_id, _ = extracted
        response = client.post(
            "/perspectives",
            json={
                "name": "No Entity",
                "included_rel_types": [
                    "temporal-semantic",
                    "subject",
                    "causal",
                    "correspondence",
                    "succession",
                    "references-to",
                    "consists-of",
                ],
            },
        )
        assert response.status_code == 201
        perspective_id = response.json()["id"]
        assert perspective_id in client.get("/perspectives").json()["perspectives"]
        view = client.get(
            f"/chronologies/{corpus_id}/timeflow?perspective={perspective_id}"
        ).json()
        assert all(r["rel_type"] != "entity" for r in view["relations"])

    def test_unknown_perspective_404(self, extracted):
        client, corpus_id, _ = extracted
        response = client.get(f"/chronologies/{corpus_id}/timeflow?perspective=ghost")
        assert response.status_code == 404


class TestGaps:
    def test_min_days_parameter(self, extracted):
        client, corpus_id, _ = extracted
        gaps = client.get(f"/chronologies/{corpus_id}/gaps?min_days=400").json()["gaps"]
        assert {"start": "2013-04-22", "end": "2014-09-09"} in gaps
        wide = client.get(f"/chronologies/{corpus_id}/gaps?min_days=3000").json()["gaps"]
        assert wide == [{"start": "2004-08-07", "end": "2013-04-20"}]
