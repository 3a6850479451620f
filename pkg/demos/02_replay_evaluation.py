"""Offline evaluation from a replay archive.

Builds a small synthetic English/French dataset, records canned model
responses into a transcript archive, then evaluates the same archive with two
extractors to show how the choice of extractor alone moves the French score
and the English-to-French gap.
"""

from mgsm_eval import (
    DatasetVersion,
    Gateway,
    ModelSpec,
    Problem,
    Transcript,
    compute_delta,
    compute_gap,
    default_profiles,
    evaluate,
    render_accuracy_table,
    render_delta_table,
)

N = 10


def build_dataset() -> DatasetVersion:
    version = DatasetVersion(version_id="demo")
    for lang in ("en", "fr"):
        for qid in range(1, N + 1):
            version.add(Problem(
                qid=qid, lang=lang,
                question=f"[{lang}] What is {qid} times 1000?",
                gold_answer=str(qid * 1000),
            ))
    return version


def build_archive(version, profiles, spec) -> dict:
    """French answers 1-4 omit the locale prefix and use dotted thousands."""
    archive = {}
    for (qid, lang), problem in version.problems.items():
        prompt = profiles[lang].prompt_template.replace("{question}", problem.question)
        grouped = f"{int(problem.gold_answer):,}".replace(",", ".")
        if lang == "fr" and qid <= 4:
            response = f"La réponse est {grouped}."
        elif lang == "fr":
            response = f"Réponse: {problem.gold_answer}"
        else:
            response = f"Answer: {problem.gold_answer}"
        key = spec.cache_key(prompt)
        archive[key] = Transcript(model=spec.name, prompt=prompt, response=response,
                                  cache_key=key, qid=qid, lang=lang,
                                  dataset_version=version.version_id)
    return archive


def main() -> None:
    profiles = default_profiles()
    version = build_dataset()
    spec = ModelSpec(name="demo-model", backend="replay")
    gateway = Gateway(archive=build_archive(version, profiles, spec))

    matrices = {}
    for extractor in ("kaggle_baseline", "last_number"):
        matrix = evaluate(version, [spec], extractor, profiles, gateway)
        matrices[extractor] = matrix
        print(f"== {extractor} ==")
        print(render_accuracy_table(matrix, compute_gap(matrix)))

    delta = compute_delta(matrices["kaggle_baseline"], matrices["last_number"])
    print("== accuracy change from swapping the extractor ==")
    print(render_delta_table(delta))


if __name__ == "__main__":
    main()
