import pytest
from fastapi.testclient import TestClient

from conftest import make_version

from mgsm_eval.api import ReviewService, create_app
from mgsm_eval.engine import CellResult, ResultMatrix
from mgsm_eval.gateway import Gateway, ModelSpec, Transcript
from mgsm_eval.qa import NEEDS_HUMAN, QAConfig, QALedger, run_qa

STRONG = ["s1", "s2", "s3", "s4"]
FLAGGED_QIDS = (3, 7, 11)


def scripted(name, responder):
    return ModelSpec(name=name, backend="scripted_mock", responder=responder)


@pytest.fixture()
def service(tmp_path, profiles):
    """A review service over a run with three German items waiting on a human."""
    version = make_version("v1", ["en", "de"], 12)
    cells = {}
    for model in STRONG:
        for lang in ("de", "en"):
            verdicts = {
                qid: "wrong" if (lang == "de" and qid in FLAGGED_QIDS) else "correct"
                for qid in range(1, 13)
            }
            cells[(model, lang)] = CellResult(accuracy=0.0, verdicts=verdicts)
    matrix = ResultMatrix(models=list(STRONG), langs=["de", "en"], cells=cells)

    config = QAConfig(
        strong_models=[scripted(m, lambda p: "Antwort: 0") for m in STRONG],
        translator=scripted("t", lambda p: "Kandidatentext?"),
        judge=scripted("j", lambda p: "no"),
    )
    gateway = Gateway()
    # seed the archive with the failing transcripts the queue should echo
    for model in STRONG:
        spec = ModelSpec(name=model, backend="replay")
        for qid in FLAGGED_QIDS:
            problem = version.get(qid, "de")
            prompt = profiles["de"].prompt_template.replace("{question}", problem.question)
            key = spec.cache_key(prompt)
            gateway.archive[key] = Transcript(
                model=model, prompt=prompt, response="Antwort: 999",
                cache_key=key, qid=qid, lang="de",
            )
    run = run_qa(version, matrix, config, gateway, QALedger(tmp_path / "l.jsonl"), profiles)
    assert all(run.items[(q, "de")].state == NEEDS_HUMAN for q in FLAGGED_QIDS)
    return ReviewService(run)


@pytest.fixture()
def client(service):
    return TestClient(create_app(service))


def test_queue_lists_waiting_items(client):
    resp = client.get("/api/queue")
    assert resp.status_code == 200
    assert resp.headers["x-total-count"] == "3"
    entries = resp.json()
    assert [(e["qid"], e["lang"]) for e in entries] == [(q, "de") for q in FLAGGED_QIDS]
    entry = entries[0]
    assert entry["state"] == "needs_human"
    assert entry["source_en"].startswith("[en]")
    assert entry["current_text"].startswith("[de]")
    assert entry["candidate_text"] == "Kandidatentext?"


def test_queue_echoes_failing_transcripts(client):
    entry = client.get("/api/queue").json()[0]
    transcripts = entry["transcripts"]
    assert len(transcripts) == len(STRONG)
    assert all(t["response"] == "Antwort: 999" for t in transcripts)
    assert all(t["extracted"] == "999" for t in transcripts)
    assert all(t["raw_span"] for t in transcripts)


def test_queue_pagination(client):
    resp = client.get("/api/queue", params={"offset": 1, "limit": 1})
    assert resp.headers["x-total-count"] == "3"
    body = resp.json()
    assert len(body) == 1 and body[0]["qid"] == FLAGGED_QIDS[1]


def test_accept_decision_removes_from_queue(client):
    resp = client.post(f"/api/items/{FLAGGED_QIDS[0]}/de/decision", json={"action": "accept"})
    assert resp.status_code == 200
    assert resp.json()["state"] == "resolved"
    assert client.get("/api/queue").headers["x-total-count"] == "2"


def test_identical_decision_is_idempotent(client):
    body = {"action": "accept"}
    first = client.post("/api/items/3/de/decision", json=body)
    second = client.post("/api/items/3/de/decision", json=body)
    assert first.status_code == second.status_code == 200
    assert first.json() == second.json()


def test_conflicting_decision_409(client):
    client.post("/api/items/3/de/decision", json={"action": "accept"})
    resp = client.post("/api/items/3/de/decision", json={"action": "reject"})
    assert resp.status_code == 409


def test_unknown_item_404(client):
    assert client.post("/api/items/99/de/decision", json={"action": "accept"}).status_code == 404
    assert client.post("/api/items/3/xx/decision", json={"action": "accept"}).status_code == 404


def test_empty_edit_422(client):
    resp = client.post("/api/items/3/de/decision", json={"action": "edit", "new_text": "  "})
    assert resp.status_code == 422


def test_unknown_action_422(client):
    resp = client.post("/api/items/3/de/decision", json={"action": "promote"})
    assert resp.status_code == 422


def test_edit_decision_sets_text(client):
    resp = client.post(
        "/api/items/7/de/decision",
        json={"action": "edit", "new_text": "Handkorrigierte Frage?"},
    )
    assert resp.status_code == 200
    assert resp.json()["state"] == "resolved"


def test_report_html_default(client):
    client.post("/api/items/3/de/decision", json={"action": "accept"})
    resp = client.get("/api/runs/current/report")
    assert resp.status_code == 200
    assert resp.headers["content-type"].startswith("text/html")
    assert "<table>" in resp.text


def test_report_csv_negotiated(client):
    client.post("/api/items/3/de/decision", json={"action": "accept"})
    resp = client.get("/api/runs/current/report", headers={"Accept": "text/csv"})
    assert resp.status_code == 200
    assert resp.headers["content-type"].startswith("text/csv")
    assert resp.text.splitlines()[0].startswith('"lang"')


def test_report_unknown_run_404(client):
    assert client.get("/api/runs/nope/report").status_code == 404


def test_static_ui_mount(tmp_path, service):
    ui = tmp_path / "ui"
    ui.mkdir()
    (ui / "index.html").write_text("<html><body>review ui</body></html>")
    with TestClient(create_app(service, ui_dir=str(ui))) as tc:
        assert "review ui" in tc.get("/").text
        # the API still wins over the static mount
        assert tc.get("/api/queue").status_code == 200
