import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for oracles.py

from mgsm_eval.dataset import DatasetVersion, Problem
from mgsm_eval.profiles import default_profiles

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def profiles():
    return default_profiles()


@pytest.fixture(scope="session")
def corpus():
    with open(FIXTURES / "extraction_corpus.json", encoding="utf-8") as fh:
        return json.load(fh)


def build_replay_gateway(version, profiles, specs, responses):
    """Replay gateway for a synthetic run.

    ``responses[(model, lang, qid)]`` is the canned model response; anything
    not listed gets a correct "<prefix> <gold>" answer.
    """
    from mgsm_eval.engine import build_prompt
    from mgsm_eval.gateway import Gateway, Transcript

    archive = {}
    for spec in specs:
        for (qid, lang), problem in version.problems.items():
            prompt = build_prompt(problem, profiles[lang])
            default = f"{profiles[lang].answer_prefix} {problem.gold_answer}"
            response = responses.get((spec.name, lang, qid), default)
            key = spec.cache_key(prompt)
            archive[key] = Transcript(
                model=spec.name, prompt=prompt, response=response,
                cache_key=key, qid=qid, lang=lang,
                dataset_version=version.version_id,
            )
    return Gateway(archive=archive)


def make_version(version_id, langs, n_problems, question=None, gold=None):
    """Synthetic aligned dataset: same qids in every language."""
    version = DatasetVersion(version_id=version_id)
    for lang in langs:
        for qid in range(1, n_problems + 1):
            q = question(qid, lang) if question else f"[{lang}] What is {qid} + {qid}?"
            g = gold(qid, lang) if gold else str(2 * qid)
            version.add(Problem(qid=qid, lang=lang, question=q, gold_answer=g))
    return version
