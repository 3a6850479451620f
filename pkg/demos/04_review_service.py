"""Driving the human review queue through its HTTP API.

Runs a scripted QA loop whose judge always rejects, so the flagged item lands
in the human queue, then exercises the review service in-process: list the
queue, apply an accept decision, show the idempotent repeat and the conflict
response, and fetch the change-category report.
"""

import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from mgsm_eval import CellResult, Gateway, ModelSpec, QAConfig, QALedger, ResultMatrix, default_profiles, run_qa
from mgsm_eval.api import ReviewService, create_app
from demo_data import make_version

STRONG = ["strong-a", "strong-b", "strong-c", "strong-d"]


def main() -> None:
    profiles = default_profiles()
    version = make_version("demo", ["en", "de"], 20)
    cells = {}
    for model in STRONG:
        for lang in ("de", "en"):
            verdicts = {qid: "wrong" if (lang == "de" and qid == 17) else "correct"
                        for qid in range(1, 21)}
            cells[(model, lang)] = CellResult(accuracy=0.0, verdicts=verdicts)
    matrix = ResultMatrix(models=list(STRONG), langs=["de", "en"], cells=cells)
    config = QAConfig(
        strong_models=[ModelSpec(name=m, backend="scripted_mock",
                                 responder=lambda p: "Antwort: 0") for m in STRONG],
        translator=ModelSpec(name="translator", backend="scripted_mock",
                             responder=lambda p: "Wie viel ist 17 plus 17?"),
        judge=ModelSpec(name="judge", backend="scripted_mock", responder=lambda p: "no"),
    )

    with tempfile.TemporaryDirectory() as tmp:
        run = run_qa(version, matrix, config, Gateway(),
                     QALedger(Path(tmp) / "ledger.jsonl"), profiles)
        client = TestClient(create_app(ReviewService(run)))

        queue = client.get("/api/queue")
        print(f"queue: {queue.headers['x-total-count']} item(s) waiting")
        for entry in queue.json():
            print(f"  {entry['lang']} qid={entry['qid']} round={entry['round']}"
                  f" candidate={entry['candidate_text']!r}")

        decision = client.post("/api/items/17/de/decision", json={"action": "accept"})
        print(f"accept -> {decision.status_code}, state={decision.json()['state']}")

        repeat = client.post("/api/items/17/de/decision", json={"action": "accept"})
        print(f"identical repeat -> {repeat.status_code} (idempotent)")

        conflict = client.post("/api/items/17/de/decision", json={"action": "reject"})
        print(f"conflicting decision -> {conflict.status_code}")

        report = client.get("/api/runs/current/report", headers={"Accept": "text/csv"})
        print("report (csv):")
        for line in report.text.splitlines():
            print(f"  {line}")


if __name__ == "__main__":
    main()
