"""MGSM-format dataset loading, validation, versioning, and diffing.

The on-disk format is the upstream TSV distribution: one problem per line,
``question<TAB>answer``, UTF-8, LF line endings. Problem ids are positional
(1-based line order), so diffing two versions requires both to preserve line
order; that is a format contract, not an implementation detail.
"""

import json
from dataclasses import dataclass, field

from .extraction import GoldAnswerError, parse_gold
from .profiles import MGSM_LANGUAGES

FULL_LANGUAGE_COUNT = len(MGSM_LANGUAGES)  # 11
FULL_PROBLEM_COUNT = 250


class DatasetFormatError(ValueError):
    """Raised for malformed TSV files or incompatible version pairs."""


@dataclass(frozen=True)
class Problem:
    qid: int
    lang: str
    question: str
    gold_answer: str


@dataclass
class DatasetVersion:
    version_id: str
    problems: dict = field(default_factory=dict)  # (qid, lang) -> Problem

    def add(self, problem: Problem) -> None:
        self.problems[(problem.qid, problem.lang)] = problem

    def languages(self) -> list:
        return sorted({lang for _, lang in self.problems})

    def qids(self, lang: str) -> list:
        return sorted(qid for qid, plang in self.problems if plang == lang)

    def get(self, qid: int, lang: str) -> Problem:
        return self.problems[(qid, lang)]


@dataclass(frozen=True)
class ChangeRecord:
    qid: int
    lang: str
    old_text: str
    new_text: str
    category: int | None = None

    def __post_init__(self):
        if self.old_text == self.new_text:
            raise ValueError("change record requires old_text != new_text")
        if self.category is not None and not 1 <= self.category <= 6:
            raise ValueError(f"category out of range: {self.category}")


def load_tsv(path, lang: str, version_id: str) -> DatasetVersion:
    """Load one language file into a single-language version fragment."""
    version = DatasetVersion(version_id=version_id)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if "\t" not in line:
                raise DatasetFormatError(f"{path}:{lineno}: missing tab separator")
            question, _, answer = line.partition("\t")
            if not question or not answer:
                raise DatasetFormatError(f"{path}:{lineno}: empty question or answer")
            try:
                parse_gold(answer)
            except GoldAnswerError:
                raise DatasetFormatError(
                    f"{path}:{lineno}: non-numeric gold answer {answer!r}"
                ) from None
            version.add(Problem(qid=lineno, lang=lang, question=question, gold_answer=answer))
    return version


def save_tsv(version: DatasetVersion, lang: str, path) -> None:
    """Write one language back out; exactly one trailing newline."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for qid in version.qids(lang):
            problem = version.get(qid, lang)
            fh.write(f"{problem.question}\t{problem.gold_answer}\n")


def merge(*fragments, version_id: str | None = None) -> DatasetVersion:
    """Combine per-language fragments into one version."""
    if not fragments:
        raise ValueError("nothing to merge")
    version_id = version_id or fragments[0].version_id
    merged = DatasetVersion(version_id=version_id)
    for fragment in fragments:
        for problem in fragment.problems.values():
            merged.add(problem)
    return merged


@dataclass
class ValidationReport:
    findings: list = field(default_factory=list)
    language_counts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.findings


def validate(version: DatasetVersion) -> ValidationReport:
    """Check per-language counts, qid alignment, and gold parseability."""
    report = ValidationReport()
    langs = version.languages()
    qid_sets = {lang: set(version.qids(lang)) for lang in langs}
    report.language_counts = {lang: len(qid_sets[lang]) for lang in langs}

    reference = set()
    for lang in langs:
        reference |= qid_sets[lang]
    for lang in langs:
        for qid in sorted(reference - qid_sets[lang]):
            report.findings.append(("misaligned", lang, qid))

    for (qid, lang), problem in sorted(version.problems.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        if not problem.question:
            report.findings.append(("empty_question", lang, qid))
        try:
            parse_gold(problem.gold_answer)
        except GoldAnswerError:
            report.findings.append(("unparseable_gold", lang, qid))
    return report


def is_full_corpus(version: DatasetVersion) -> bool:
    langs = version.languages()
    return (
        len(langs) == FULL_LANGUAGE_COUNT
        and set(langs) == set(MGSM_LANGUAGES)
        and all(len(version.qids(lang)) == FULL_PROBLEM_COUNT for lang in langs)
    )


def diff_versions(old: DatasetVersion, new: DatasetVersion) -> list:
    """One ChangeRecord per (qid, lang) whose question text differs.

    Records come out in (lang, qid) order; categories are left unset.
    """
    if set(old.languages()) != set(new.languages()):
        raise DatasetFormatError(
            f"language sets differ: {old.languages()} vs {new.languages()}"
        )
    records = []
    for lang in old.languages():
        common = sorted(set(old.qids(lang)) & set(new.qids(lang)))
        for qid in common:
            before = old.get(qid, lang)
            after = new.get(qid, lang)
            if before.question != after.question:
                records.append(
                    ChangeRecord(
                        qid=qid,
                        lang=lang,
                        old_text=before.question,
                        new_text=after.question,
                    )
                )
    return records


def save_change_records(records, path) -> None:
    """Line-delimited JSON export of change records."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(
                json.dumps(
                    {
                        "qid": rec.qid,
                        "lang": rec.lang,
                        "old_text": rec.old_text,
                        "new_text": rec.new_text,
                        "category": rec.category,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_change_records(path) -> list:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            data = json.loads(line)
            records.append(
                ChangeRecord(
                    qid=data["qid"],
                    lang=data["lang"],
                    old_text=data["old_text"],
                    new_text=data["new_text"],
                    category=data.get("category"),
                )
            )
    return records
