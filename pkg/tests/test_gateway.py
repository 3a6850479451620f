import pytest

from mgsm_eval.gateway import (
    ERROR_RESPONSE_FLAG,
    Gateway,
    MockExhaustedError,
    ModelSpec,
    ReplayMissError,
    Transcript,
    load_archive,
    record_run,
    save_archive,
)


def scripted(name, responses):
    return ModelSpec(name=name, backend="scripted_mock", script=tuple(responses))


def test_cache_key_deterministic():
    spec = ModelSpec(name="m", backend="replay")
    assert spec.cache_key("hello") == spec.cache_key("hello")
    assert spec.cache_key("hello") != spec.cache_key("hello!")


def test_cache_key_depends_on_params():
    a = ModelSpec(name="m", backend="replay", temperature=0.0)
    b = ModelSpec(name="m", backend="replay", temperature=0.7)
    assert a.cache_key("p") != b.cache_key("p")


def test_http_provider_requires_endpoint():
    with pytest.raises(ValueError):
        ModelSpec(name="m", backend="http_provider")


def test_replay_hit_returns_stored_response():
    spec = ModelSpec(name="m", backend="replay")
    key = spec.cache_key("2+2?")
    gw = Gateway(archive={key: Transcript(model="m", prompt="2+2?", response="Answer: 4", cache_key=key)})
    assert gw.complete(spec, "2+2?") == "Answer: 4"


def test_replay_miss_raises_with_key():
    spec = ModelSpec(name="m", backend="replay")
    gw = Gateway()
    with pytest.raises(ReplayMissError) as err:
        gw.complete(spec, "unseen prompt")
    assert spec.cache_key("unseen prompt") in str(err.value)


def test_scripted_mock_pops_then_exhausts():
    spec = scripted("mock", ["Answer: 7"])
    gw = Gateway()
    assert gw.complete(spec, "q1") == "Answer: 7"
    with pytest.raises(MockExhaustedError):
        gw.complete(spec, "q2")


def test_scripted_responses_are_cached():
    spec = scripted("mock", ["only one"])
    gw = Gateway()
    assert gw.complete(spec, "q") == "only one"
    # repeat of the same prompt comes from cache, not the script
    assert gw.complete(spec, "q") == "only one"


def test_responder_function_mock():
    spec = ModelSpec(name="echo", backend="scripted_mock", responder=lambda p: f"Answer: {len(p)}")
    gw = Gateway()
    assert gw.complete(spec, "abcd") == "Answer: 4"


def test_record_run_counts(tmp_path):
    specs = [scripted("a", ["1", "2", "3"]), scripted("b", ["4", "5", "6"])]
    gw = Gateway()
    path = tmp_path / "archive.jsonl"
    transcripts = record_run(gw, specs, ["p1", "p2", "p3"], path)
    assert len(transcripts) == 6
    assert all(not t.error for t in transcripts)
    archive = load_archive(path)
    assert len(archive) == 6


def test_record_run_flags_failures(tmp_path):
    ok = scripted("a", ["1", "2", "3"])
    failing = scripted("b", ["4", "5"])  # runs dry on the third prompt
    gw = Gateway()
    path = tmp_path / "archive.jsonl"
    transcripts = record_run(gw, [ok, failing], ["p1", "p2", "p3"], path)
    flagged = [t for t in transcripts if t.error]
    assert len(flagged) == 1
    assert flagged[0].response == ERROR_RESPONSE_FLAG


def test_record_rerun_no_duplicates(tmp_path):
    spec = scripted("a", ["1", "2"])
    gw = Gateway()
    path = tmp_path / "archive.jsonl"
    record_run(gw, [spec], ["p1", "p2"], path)
    # rerun over the now-populated cache: same keys, still 2 entries
    record_run(gw, [spec], ["p1", "p2"], path)
    assert len(load_archive(path)) == 2


def test_archive_round_trip(tmp_path):
    t = Transcript(model="m", prompt="p", response="r ünïcode", cache_key="k1", qid=3, lang="de")
    path = tmp_path / "a.jsonl"
    save_archive([t], path)
    loaded = load_archive(path)
    assert loaded["k1"] == t


def test_order_independence_of_keys():
    spec = scripted("m", ["a", "b"])
    gw1, gw2 = Gateway(), Gateway()
    gw1.complete(spec, "p1")
    gw1.complete(spec, "p2")
    gw2.complete(ModelSpec(name="m", backend="scripted_mock", script=("a", "b")), "p2")
    gw2.complete(ModelSpec(name="m", backend="scripted_mock", script=("a", "b")), "p1")
    assert set(gw1.archive) == set(gw2.archive)
