"""The dataset QA loop end to end, with scripted model backends.

Flags a German problem that three of four strong models miss, retranslates it
from the English source, judges the retranslation, re-solves the candidate,
and prints the append-only ledger plus the resulting change record. A second
run over the same ledger shows resumption: nothing is recomputed.
"""

import json
import tempfile
from pathlib import Path

from mgsm_eval import (
    CellResult,
    Gateway,
    ModelSpec,
    QAConfig,
    QALedger,
    ResultMatrix,
    default_profiles,
    run_qa,
)
from demo_data import make_version

STRONG = ["strong-a", "strong-b", "strong-c", "strong-d"]
CANDIDATE = "Wie viel ist 17 plus 17?"


def matrix_with_failure() -> ResultMatrix:
    cells = {}
    for model in STRONG:
        for lang in ("de", "en"):
            verdicts = {
                qid: "wrong" if (lang == "de" and qid == 17 and model != STRONG[-1])
                else "correct"
                for qid in range(1, 21)
            }
            cells[(model, lang)] = CellResult(accuracy=0.0, verdicts=verdicts)
    return ResultMatrix(models=list(STRONG), langs=["de", "en"], cells=cells)


def scripted_config() -> QAConfig:
    def solver(prompt):
        return "Antwort: 34" if CANDIDATE in prompt else "Antwort: 0"

    return QAConfig(
        strong_models=[ModelSpec(name=m, backend="scripted_mock", responder=solver)
                       for m in STRONG],
        translator=ModelSpec(name="translator", backend="scripted_mock",
                             responder=lambda p: CANDIDATE),
        judge=ModelSpec(name="judge", backend="scripted_mock",
                        responder=lambda p: "yes"),
    )


def main() -> None:
    profiles = default_profiles()
    version = make_version("demo", ["en", "de"], 20)
    with tempfile.TemporaryDirectory() as tmp:
        ledger_path = Path(tmp) / "ledger.jsonl"
        run = run_qa(version, matrix_with_failure(), scripted_config(),
                     Gateway(), QALedger(ledger_path), profiles)

        print("== ledger ==")
        for line in ledger_path.read_text(encoding="utf-8").splitlines():
            event = json.loads(line)
            print(f"  {event.get('event'):>12}  " +
                  " ".join(f"{k}={v}" for k, v in sorted(event.items()) if k != "event"))

        print("\n== change records ==")
        for rec in run.change_records():
            print(f"  {rec.lang} qid={rec.qid}: {rec.old_text!r} -> {rec.new_text!r}")

        before = ledger_path.read_bytes()
        run_qa(version, matrix_with_failure(), scripted_config(),
               Gateway(), QALedger(ledger_path), profiles)
        print("\n== resumption ==")
        print("  rerun left the ledger byte-identical:",
              ledger_path.read_bytes() == before)


if __name__ == "__main__":
    main()
