"""Shared synthetic-data helpers for the demo scripts."""

from mgsm_eval import DatasetVersion, Problem


def make_version(version_id: str, langs, n_problems: int) -> DatasetVersion:
    """An aligned toy dataset: question ``qid + qid``, gold ``2 * qid``."""
    version = DatasetVersion(version_id=version_id)
    for lang in langs:
        for qid in range(1, n_problems + 1):
            version.add(Problem(
                qid=qid, lang=lang,
                question=f"[{lang}] What is {qid} + {qid}?",
                gold_answer=str(2 * qid),
            ))
    return version
