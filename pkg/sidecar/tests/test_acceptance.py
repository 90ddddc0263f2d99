"""Sidecar acceptance: the service satisfies the scorer contract end to end."""

import socket
import threading
import time

import pytest
import uvicorn
from fastapi.testclient import TestClient

from scorer_sidecar.app import create_app
from scorer_sidecar.engines import HeuristicEngine


def _free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


@pytest.fixture(scope="module")
def live_server():
    port = _free_port()
    config = uvicorn.Config(
        create_app(engine=HeuristicEngine()), host="127.0.0.1", port=port, log_level="error"
    )
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 10
    while not server.started:
        if time.monotonic() > deadline:
            raise RuntimeError("sidecar did not start")
        time.sleep(0.02)
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


def test_sidecar_contract(live_server):
    """3x4 /nli matrix in [0,1]; /ner yields a PERSON span; /info pins models.

    Exercised through the evaluation harness's own HTTP scorer client, so a
    passing run proves the service is a drop-in replacement for the mock.
    """
    from legalsumm.consistency import RemoteScorer

    scorer = RemoteScorer(live_server)

    scores = scorer.nli(
        ["The appeal was allowed.", "Costs followed the event.", "A fine of Rs. 500 was imposed."],
        ["appeal allowed", "fine imposed", "costs awarded", "nothing related"],
    )
    assert len(scores) == 3 and all(len(row) == 4 for row in scores)
    assert all(0.0 <= v <= 1.0 for row in scores for v in row)

    entities = scorer.ner("Mahabir filed an application")
    persons = [e for e in entities if e["label"] == "PERSON"]
    assert persons and persons[0]["text"] == "Mahabir"

    info = scorer.info()
    assert info["engine"] == "heuristic"
    assert info["models"]["nli"] and info["models"]["ner"]

    print("\nACCEPTANCE PASS: sidecar contract (/nli 3x4, /ner PERSON span, /info models)")


def test_primary_runs_without_sidecar():
    """The evaluation harness must not import the sidecar package."""
    import subprocess
    import sys

    code = (
        "import sys\n"
        "import legalsumm, legalsumm.consistency, legalsumm.evalrunner, legalsumm.cli\n"
        "assert not any(m.startswith('scorer_sidecar') for m in sys.modules), 'coupled'\n"
    )
    subprocess.run([sys.executable, "-c", code], check=True)
    print("\nACCEPTANCE PASS: primary harness independent of sidecar")


def test_summac_through_sidecar(live_server):
    """document_summac accepts the remote scorer transparently."""
    from legalsumm.consistency import RemoteScorer, document_summac

    doc = "The appeal was allowed. Costs were awarded to the appellant."
    summary = "The appeal was allowed."
    score = document_summac(doc, summary, scorer=RemoteScorer(live_server))
    assert score == 1.0


def test_testclient_contract_matches_live():
    client = TestClient(create_app(engine=HeuristicEngine()))
    payload = {"premises": ["a b"], "hypotheses": ["a", "b", "c"]}
    scores = client.post("/nli", json=payload).json()["scores"]
    assert scores == [[1.0, 1.0, 0.0]]
