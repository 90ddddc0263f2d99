import threading

import pytest
from fastapi.testclient import TestClient

from scorer_sidecar.app import create_app
from scorer_sidecar.engines import EngineUnavailable, HeuristicEngine, create_engine


@pytest.fixture
def client():
    return TestClient(create_app(engine=HeuristicEngine(), max_pairs=64))


class TestNli:
    def test_matrix_shape_and_range(self, client):
        resp = client.post(
            "/nli",
            json={
                "premises": ["The court allowed the appeal.", "Costs were awarded.", "A fine was imposed."],
                "hypotheses": ["appeal allowed", "fine imposed", "costs", "unrelated text"],
            },
        )
        assert resp.status_code == 200
        scores = resp.json()["scores"]
        assert len(scores) == 3
        assert all(len(row) == 4 for row in scores)
        assert all(0.0 <= v <= 1.0 for row in scores for v in row)

    def test_verbatim_pair_scores_highest(self, client):
        resp = client.post(
            "/nli",
            json={
                "premises": ["the appeal was dismissed with costs"],
                "hypotheses": ["the appeal was dismissed with costs", "completely different words"],
            },
        )
        row = resp.json()["scores"][0]
        assert row[0] == 1.0
        assert row[0] > row[1]

    def test_empty_hypotheses_rejected(self, client):
        resp = client.post("/nli", json={"premises": ["a"], "hypotheses": []})
        assert resp.status_code == 422

    def test_oversized_batch_rejected(self, client):
        resp = client.post(
            "/nli", json={"premises": ["p"] * 10, "hypotheses": ["h"] * 10}
        )
        assert resp.status_code == 413

    def test_stateless(self, client):
        payload = {"premises": ["a b c", "d e"], "hypotheses": ["a b", "e"]}
        first = client.post("/nli", json=payload).json()
        second = client.post("/nli", json=payload).json()
        assert first == second


class TestNer:
    def test_person_span(self, client):
        resp = client.post("/ner", json={"text": "Mahabir filed an application"})
        assert resp.status_code == 200
        entities = resp.json()["entities"]
        persons = [e for e in entities if e["label"] == "PERSON"]
        assert persons
        span = persons[0]
        assert span["text"] == "Mahabir"
        assert "Mahabir filed an application"[span["start"] : span["end"]] == "Mahabir"

    def test_no_entities_in_plain_text(self, client):
        resp = client.post("/ner", json={"text": "the quick brown fox"})
        assert resp.json()["entities"] == []

    def test_labels(self, client):
        text = "The Supreme Court of India applied the Exports Control Act in 1961."
        entities = client.post("/ner", json={"text": text}).json()["entities"]
        labels = {e["text"]: e["label"] for e in entities}
        assert labels["Supreme Court of India"] == "ORG"
        assert labels["Exports Control Act"] == "LAW"
        assert labels["1961"] == "DATE"

    def test_spans_valid(self, client):
        text = 'On 5 March 1962 the Bombay High Court heard M.K. Ramaswami ("the dealer").'
        entities = client.post("/ner", json={"text": text}).json()["entities"]
        for e in entities:
            assert 0 <= e["start"] < e["end"] <= len(text)
            assert text[e["start"] : e["end"]] == e["text"]

    def test_empty_text_rejected(self, client):
        resp = client.post("/ner", json={"text": ""})
        assert resp.status_code == 422


class TestInfo:
    def test_reports_engine_and_models(self, client):
        data = client.get("/info").json()
        assert data["engine"] == "heuristic"
        assert data["models"]["nli"]
        assert data["models"]["ner"]
        assert data["max_pairs"] == 64


class TestEngineSelection:
    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            create_engine(kind="nope")

    def test_auto_degrades_to_heuristic(self, monkeypatch):
        # with no downloadable weights, auto must still produce a working engine
        engine = create_engine(kind="auto", nli_model="does/not-exist")
        assert engine.nli(["a"], ["a"]) == [[1.0]]

    def test_unavailable_engine_maps_to_503(self):
        class Broken:
            name = "broken"
            nli_model = ner_model = "none"

            def nli(self, premises, hypotheses):
                raise EngineUnavailable("weights gone")

        client = TestClient(create_app(engine=Broken(), max_pairs=64))
        resp = client.post("/nli", json={"premises": ["a"], "hypotheses": ["b"]})
        assert resp.status_code == 503

    def test_load_failure_maps_to_503(self, monkeypatch):
        monkeypatch.setenv("SIDECAR_ENGINE", "transformers")
        monkeypatch.setenv("SIDECAR_NLI_MODEL", "does/not-exist")
        client = TestClient(create_app(max_pairs=64))
        resp = client.post("/nli", json={"premises": ["a"], "hypotheses": ["b"]})
        assert resp.status_code == 503


class TestConcurrency:
    def test_parallel_requests(self, client):
        payload = {"premises": ["a b c d"], "hypotheses": ["a b", "c", "z"]}
        results = [None] * 8
        expected = client.post("/nli", json=payload).json()

        def worker(i):
            results[i] = client.post("/nli", json=payload).json()

        threads = [threading.Thread(target=worker, args=(i,)) for i in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert all(r == expected for r in results)
