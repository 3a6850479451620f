"""Acceptance gate: one test per release criterion.

Each test prints a single ``ACCEPTANCE PASS`` line on success (visible with
``pytest -v -s`` or in the failure report otherwise); assertion failures mark
the criterion as failed. Everything here runs offline from fixtures except
the explicitly network-gated live smoke test, which is skipped unless
credentials are present.
"""

import json
import os
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_version

from mgsm_eval.api import ReviewService, create_app
from mgsm_eval.dataset import DatasetVersion, Problem
from mgsm_eval.engine import (
    CellResult,
    ResultMatrix,
    accuracy_percent,
    compute_delta,
    compute_gap,
    evaluate_grid,
)
from mgsm_eval.extraction import KAGGLE_BASELINE, LAST_NUMBER, extract
from mgsm_eval.gateway import Gateway, ModelSpec, Transcript
from mgsm_eval.numerals import denormalize_numerals, normalize_numerals
from mgsm_eval.profiles import MGSM_LANGUAGES, default_profiles
from mgsm_eval.qa import (
    NEEDS_HUMAN,
    RESOLVED,
    ClassificationError,
    QAConfig,
    QALedger,
    build_classification_prompt,
    classify_change,
    flag_problems,
    run_qa,
)

FIXTURES = Path(__file__).parent / "fixtures"


def _ok(line: str) -> None:
    print(f"ACCEPTANCE PASS: {line}", flush=True)


@pytest.fixture(scope="module")
def profiles():
    return default_profiles()


# -- extraction differential oracle ----------------------------------------

def test_extraction_differential_oracle(profiles):
    started = time.monotonic()
    with open(FIXTURES / "extraction_corpus.json", encoding="utf-8") as fh:
        corpus = json.load(fh)
    assert len(corpus) >= 50
    assert {case["lang"] for case in corpus} == set(MGSM_LANGUAGES)

    traced = {
        ("en", "Answer: 2.000."): ("kaggle", "2"),
        ("fr", "La réponse est 2.000."): ("last_number", "2000"),
        ("de", "Antwort: 1 234,00 Euro kostet es"): ("last_number", "1234"),
        ("bn", "উত্তর: ১২৩"): ("last_number", "123"),
    }
    seen_traced = set()
    mismatches = []
    for case in corpus:
        profile = profiles[case["lang"]]
        got_k = extract(case["text"], KAGGLE_BASELINE, profile).value or ""
        got_l = extract(case["text"], LAST_NUMBER, profile).value or ""
        if got_k != case["kaggle"] or got_l != case["last_number"]:
            mismatches.append((case, got_k, got_l))
        key = (case["lang"], case["text"])
        if key in traced:
            which, expected = traced[key]
            actual = got_k if which == "kaggle" else got_l
            assert actual == expected, (key, which, actual)
            seen_traced.add(key)
    assert mismatches == []
    assert seen_traced == set(traced)
    elapsed = time.monotonic() - started
    assert elapsed < 1.0
    _ok(f"extraction differential oracle: {len(corpus)}/{len(corpus)} "
        f"golden matches in {elapsed:.2f}s")


# -- Bengali numeral bijection ---------------------------------------------

def test_bengali_numeral_bijection():
    started = time.monotonic()
    bengali_digits = "০১২৩৪৫৬৭৮৯"
    assert normalize_numerals(bengali_digits, "bengali") == "0123456789"
    assert denormalize_numerals("0123456789", "bengali") == bengali_digits

    @settings(deadline=None, max_examples=200)
    @given(st.text(alphabet=bengali_digits + "0123456789 .,abcট", max_size=40))
    def round_trip(text):
        normalized = normalize_numerals(text, "bengali")
        # idempotence
        assert normalize_numerals(normalized, "bengali") == normalized
        # inverse-map restores originals for pure-Bengali strings
        pure = "".join(c for c in text if c in bengali_digits)
        assert denormalize_numerals(normalize_numerals(pure, "bengali"), "bengali") == pure

    round_trip()
    elapsed = time.monotonic() - started
    assert elapsed < 1.0
    _ok(f"bengali numeral bijection in {elapsed:.2f}s")


# -- accuracy / gap / delta arithmetic -------------------------------------

REPORTED_LANGS = ("en", "bn", "de", "es", "fr", "ja", "ru", "sw", "te", "th", "zh")
REPORTED_OLD = (97.6, 94.4, 93.6, 92.0, 80.0, 91.2, 95.2, 95.2, 92.4, 94.0, 94.0)
REPORTED_NEW = (99.6, 99.2, 99.6, 98.8, 98.4, 100.0, 99.6, 98.4, 99.6, 98.8, 100.0)
REPORTED_DELTA = (2.0, 4.8, 6.0, 6.8, 18.4, 8.8, 4.4, 3.2, 7.2, 4.8, 6.0)


def _row_matrix(model, values):
    cells = {
        (model, lang): CellResult(accuracy=v, verdicts={})
        for lang, v in zip(REPORTED_LANGS, values)
    }
    return ResultMatrix(models=[model], langs=list(REPORTED_LANGS), cells=cells)


def test_accuracy_gap_delta_arithmetic():
    assert accuracy_percent(244, 250) == 97.6

    gap_initial = compute_gap(_row_matrix("gpt5", REPORTED_OLD)).gap("gpt5", "fr")
    assert gap_initial == 17.6
    gap_fixed = compute_gap(_row_matrix("gpt5", REPORTED_NEW)).gap("gpt5", "fr")
    assert gap_fixed == 1.2

    delta = compute_delta(_row_matrix("gpt5", REPORTED_OLD), _row_matrix("gpt5", REPORTED_NEW))
    computed = tuple(delta.delta("gpt5", lang) for lang in REPORTED_LANGS)
    assert computed == REPORTED_DELTA
    _ok("accuracy 244/250=97.6, gap 17.6 -> 1.2, full delta row exact")


# -- 2x2 grid replay --------------------------------------------------------

def _grid_fixture(profiles):
    """Two dataset versions and a replay archive with designed extractor splits.

    fr responses that omit the locale answer prefix are invisible to
    kaggle_baseline but recovered by last_number; v2 rewords two of the four
    offending questions so its kaggle accuracy rises by a designed 20 points.
    """
    def gold(qid, lang):
        return str(1000 + qid)

    v1 = make_version("v1", ["en", "fr"], 10, gold=gold)
    v2 = make_version(
        "v2", ["en", "fr"], 10,
        question=lambda qid, lang: f"[{lang}/v2] What is {qid} plus {1000}?",
        gold=gold,
    )
    spec = ModelSpec(name="m", backend="replay")
    prefixless = "La réponse est {g}."
    prefixed = "Réponse: {g}"
    archive = {}
    for version, bad_qids in ((v1, {1, 2, 3, 4}), (v2, {1, 2})):
        for (qid, lang), problem in version.problems.items():
            prompt = profiles[lang].prompt_template.replace("{question}", problem.question)
            if lang == "fr" and qid in bad_qids:
                response = prefixless.format(g=problem.gold_answer)
            elif lang == "fr":
                response = prefixed.format(g=problem.gold_answer)
            else:
                response = f"Answer: {problem.gold_answer}"
            key = spec.cache_key(prompt)
            archive[key] = Transcript(model="m", prompt=prompt, response=response,
                                      cache_key=key, qid=qid, lang=lang,
                                      dataset_version=version.version_id)
    return v1, v2, spec, Gateway(archive=archive)


def test_2x2_grid_replay(profiles):
    started = time.monotonic()
    v1, v2, spec, gateway = _grid_fixture(profiles)
    grid = evaluate_grid([v1, v2], [spec], [KAGGLE_BASELINE, LAST_NUMBER],
                         profiles, gateway)
    assert set(grid) == {("v1", KAGGLE_BASELINE), ("v1", LAST_NUMBER),
                         ("v2", KAGGLE_BASELINE), ("v2", LAST_NUMBER)}

    acc = {key: m.accuracy("m", "fr") for key, m in grid.items()}
    # designed fixture accuracies
    assert acc[("v1", KAGGLE_BASELINE)] == 60.0
    assert acc[("v1", LAST_NUMBER)] == 100.0
    assert acc[("v2", KAGGLE_BASELINE)] == 80.0
    assert acc[("v2", LAST_NUMBER)] == 100.0

    # old/old -> new/new decomposes additively along either path
    dataset_delta = compute_delta(grid[("v1", KAGGLE_BASELINE)], grid[("v2", KAGGLE_BASELINE)])
    extractor_delta = compute_delta(grid[("v2", KAGGLE_BASELINE)], grid[("v2", LAST_NUMBER)])
    total_delta = compute_delta(grid[("v1", KAGGLE_BASELINE)], grid[("v2", LAST_NUMBER)])
    assert dataset_delta.delta("m", "fr") == 20.0
    assert extractor_delta.delta("m", "fr") == 20.0
    assert total_delta.delta("m", "fr") == 40.0

    # extractor monotonicity on every cell of both versions
    for version in ("v1", "v2"):
        kag, last = grid[(version, KAGGLE_BASELINE)], grid[(version, LAST_NUMBER)]
        for cell in kag.cells:
            assert last.cells[cell].accuracy >= kag.cells[cell].accuracy, (version, cell)

    elapsed = time.monotonic() - started
    assert elapsed < 5.0
    _ok(f"2x2 grid replay with designed deltas and monotonicity in {elapsed:.2f}s")


# -- QA loop with scripted backends ----------------------------------------

STRONG = ["s1", "s2", "s3", "s4"]


def _qa_matrix(fail_models, qid=17):
    cells = {}
    for model in STRONG:
        for lang in ("de", "en"):
            verdicts = {
                q: "wrong" if (model in fail_models and lang == "de" and q == qid)
                else "correct"
                for q in range(1, 21)
            }
            cells[(model, lang)] = CellResult(accuracy=0.0, verdicts=verdicts)
    return ResultMatrix(models=list(STRONG), langs=["de", "en"], cells=cells)


def _qa_config(judge_reply, solver_ok=True, candidate="Kandidat 17?", gold="34"):
    def solver(prompt):
        if candidate in prompt and solver_ok:
            return f"Antwort: {gold}"
        return "Antwort: 0"

    return QAConfig(
        strong_models=[ModelSpec(name=m, backend="scripted_mock", responder=solver)
                       for m in STRONG],
        translator=ModelSpec(name="t", backend="scripted_mock",
                             responder=lambda p: candidate),
        judge=ModelSpec(name="j", backend="scripted_mock",
                        responder=lambda p: judge_reply),
    )


def test_qa_loop_scripted(tmp_path, profiles):
    started = time.monotonic()
    version = make_version("v", ["en", "de"], 20)

    # (a) 3-of-4 flags, 2-of-4 does not
    _, flagged3 = flag_problems(_qa_matrix(STRONG[:3]), STRONG, 0.5)
    _, flagged2 = flag_problems(_qa_matrix(STRONG[:2]), STRONG, 0.5)
    assert [(i.qid, i.lang) for i in flagged3] == [(17, "de")]
    assert flagged2 == []

    # (b) scripted pass-path resolves in one round with one ChangeRecord
    config = _qa_config("yes")
    run = run_qa(version, _qa_matrix(STRONG[:3]), config, Gateway(),
                 QALedger(tmp_path / "pass.jsonl"), profiles)
    item = run.items[(17, "de")]
    assert item.state == RESOLVED and item.round == 1
    assert len(run.change_records()) == 1

    # (c) always-fail judge escalates after exactly max_rounds=3
    config = _qa_config("no")
    run = run_qa(version, _qa_matrix(STRONG[:3]), config, Gateway(),
                 QALedger(tmp_path / "fail.jsonl"), profiles)
    item = run.items[(17, "de")]
    assert item.state == NEEDS_HUMAN and item.round == 3

    # (d) rerunning from the ledger is a no-op
    path = tmp_path / "pass.jsonl"
    before = path.read_bytes()
    rerun = run_qa(version, _qa_matrix(STRONG[:3]), _qa_config("no"), Gateway(),
                   QALedger(path), profiles)
    assert path.read_bytes() == before
    assert rerun.items[(17, "de")].state == RESOLVED

    elapsed = time.monotonic() - started
    assert elapsed < 5.0
    _ok(f"QA loop criteria (a)-(d) in {elapsed:.2f}s")


# -- classification prompt bit-match ---------------------------------------

def test_classification_prompt_bit_match():
    from importlib import resources

    template = resources.files("mgsm_eval.data").joinpath(
        "classification_prompt.txt").read_text(encoding="utf-8")
    cases = [
        ("classification_prompt_unit.txt",
         "James writes a 3-page letter to 2 different friends twice a week. "
         "How long does he spend writing per year?",
         "James writes a 3-page letter to 2 different friends twice a week. "
         "How many minutes does he spend writing per year, if a page takes him "
         "10 minutes?",
         "6240"),
        ("classification_prompt_numeric.txt",
         "Elle erhält $20 Cashback für jeden Einkauf.",
         "Elle erhält $0,20 Cashback für jeden Einkauf.",
         "24"),
    ]
    for filename, v1, v2, answer in cases:
        golden = (FIXTURES / filename).read_bytes()
        built = build_classification_prompt(v1, v2, answer, template).encode("utf-8")
        assert built == golden, filename

    gw = Gateway()
    ok_judge = ModelSpec(name="j2", backend="scripted_mock", responder=lambda p: "2")
    assert classify_change("old", "new", "5", ok_judge, gw) == 2
    bad_judge = ModelSpec(name="j7", backend="scripted_mock", responder=lambda p: "7")
    with pytest.raises(ClassificationError):
        classify_change("old", "new", "5", bad_judge, gw)
    _ok("classification prompt bit-match and strict 1..6 parse")


# -- review API contract ----------------------------------------------------

def test_review_api_contract(tmp_path, profiles):
    version = make_version("v", ["en", "de"], 20)
    config = _qa_config("no")
    run = run_qa(version, _qa_matrix(STRONG[:3]), config, Gateway(),
                 QALedger(tmp_path / "api.jsonl"), profiles)
    client = TestClient(create_app(ReviewService(run)))

    resp = client.get("/api/queue")
    assert resp.status_code == 200
    assert resp.headers["x-total-count"] == "1"
    assert resp.json()[0]["qid"] == 17

    first = client.post("/api/items/17/de/decision", json={"action": "accept"})
    repeat = client.post("/api/items/17/de/decision", json={"action": "accept"})
    assert first.status_code == repeat.status_code == 200
    assert first.json() == repeat.json()

    conflict = client.post("/api/items/17/de/decision", json={"action": "reject"})
    assert conflict.status_code == 409

    assert client.post("/api/items/999/de/decision",
                       json={"action": "accept"}).status_code == 404
    _ok("review API contract: queue, idempotent decision, 409 conflict, 404")


# -- optional live smoke (network-gated) ------------------------------------

LIVE_MODEL = os.environ.get("MGSM_LIVE_MODEL", "")
LIVE_ENDPOINT = os.environ.get("MGSM_LIVE_ENDPOINT", "")
_live_key_var = f"{LIVE_MODEL.upper().replace('-', '_').replace('.', '_')}_API_KEY"
_live_ready = bool(LIVE_MODEL and LIVE_ENDPOINT and os.environ.get(_live_key_var))


@pytest.mark.skipif(not _live_ready,
                    reason="live smoke needs MGSM_LIVE_MODEL, MGSM_LIVE_ENDPOINT, "
                           "and the matching *_API_KEY")
def test_live_smoke(profiles):
    from mgsm_eval.engine import evaluate

    version = DatasetVersion(version_id="live-smoke")
    problems = [
        ("Natalia sold clips to 4 friends, 12 clips each. How many clips in total?", "48"),
        ("A shirt costs $15 and a hat costs $9. How much do both cost?", "24"),
        ("Tom reads 20 pages a day. How many pages in 6 days?", "120"),
        ("There are 7 rows of 8 chairs. How many chairs?", "56"),
        ("A baker made 100 rolls and sold 37. How many are left?", "63"),
        ("Five boxes hold 11 pens each. How many pens?", "55"),
        ("Lena saves $12 a week. How much after 9 weeks?", "108"),
        ("A train travels 60 miles per hour for 3 hours. How many miles?", "180"),
        ("Sam has 45 marbles and gives away 18. How many remain?", "27"),
        ("Each pack has 6 cans; Mia buys 7 packs. How many cans?", "42"),
    ]
    for qid, (question, gold) in enumerate(problems, start=1):
        version.add(Problem(qid=qid, lang="en", question=question, gold_answer=gold))
    spec = ModelSpec(name=LIVE_MODEL, backend="http_provider", endpoint=LIVE_ENDPOINT)
    matrix = evaluate(version, [spec], "locale_aware", profiles, Gateway())
    cell = matrix.cells[(LIVE_MODEL, "en")]
    parseable = [v for v in cell.verdicts.values() if v in ("correct", "wrong")]
    assert parseable, "no parseable answers returned"
    correct = sum(1 for v in parseable if v == "correct")
    assert correct / len(parseable) >= 0.8
    _ok(f"live smoke: {correct}/{len(parseable)} parseable answers correct")
