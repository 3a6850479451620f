"""Evaluation driver: prompts, scoring, and derived accuracy tables.

Accuracies are rounded to one decimal before any gap or delta arithmetic,
because the downstream tables visibly operate on one-decimal values; all
one-decimal math goes through Decimal to avoid float drift.
"""

import hashlib
import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal

from .dataset import DatasetVersion
from .extraction import EXTRACTION_METHODS, canonical_equal, extract
from .gateway import Gateway, ModelSpec, ReplayMissError, TransportError
from .profiles import QUESTION_PLACEHOLDER, LocaleProfile

CORRECT = "correct"
WRONG = "wrong"
UNPARSEABLE = "unparseable"
ERRORED = "errored"


class ConfigError(ValueError):
    """Bad prompt template, extractor name, or axis mismatch."""


def build_prompt(problem, profile: LocaleProfile) -> str:
    """Substitute the question into the profile's prompt template."""
    if profile.prompt_template.count(QUESTION_PLACEHOLDER) != 1:
        raise ConfigError(
            f"[{profile.lang_code}] template must contain exactly one"
            f" {QUESTION_PLACEHOLDER} placeholder"
        )
    return profile.prompt_template.replace(QUESTION_PLACEHOLDER, problem.question)


def one_decimal(value) -> float:
    return float(Decimal(value).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def _decimal_diff(a: float, b: float) -> float:
    return float(Decimal(str(a)) - Decimal(str(b)))


def accuracy_percent(correct: int, total: int) -> float:
    """100 * correct / total at one decimal."""
    if total == 0:
        raise ValueError("accuracy over zero problems")
    return one_decimal(Decimal(100 * correct) / Decimal(total))


@dataclass
class CellResult:
    accuracy: float
    verdicts: dict  # qid -> verdict string

    def count(self, verdict: str) -> int:
        return sum(1 for v in self.verdicts.values() if v == verdict)


@dataclass
class ResultMatrix:
    models: list
    langs: list
    cells: dict  # (model, lang) -> CellResult
    dataset_version: str = ""
    extractor: str = ""
    prompt_config_hash: str = ""

    def accuracy(self, model: str, lang: str) -> float:
        return self.cells[(model, lang)].accuracy

    def to_dict(self) -> dict:
        return {
            "models": self.models,
            "langs": self.langs,
            "dataset_version": self.dataset_version,
            "extractor": self.extractor,
            "prompt_config_hash": self.prompt_config_hash,
            "cells": {
                f"{model}/{lang}": {
                    "accuracy": cell.accuracy,
                    "verdicts": {str(q): v for q, v in sorted(cell.verdicts.items())},
                }
                for (model, lang), cell in sorted(self.cells.items())
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ResultMatrix":
        cells = {}
        for key, raw in data["cells"].items():
            model, _, lang = key.rpartition("/")
            cells[(model, lang)] = CellResult(
                accuracy=raw["accuracy"],
                verdicts={int(q): v for q, v in raw["verdicts"].items()},
            )
        return cls(
            models=data["models"],
            langs=data["langs"],
            cells=cells,
            dataset_version=data["dataset_version"],
            extractor=data["extractor"],
            prompt_config_hash=data["prompt_config_hash"],
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_dict(), fh, ensure_ascii=False, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ResultMatrix":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def prompt_config_hash(profiles: dict) -> str:
    payload = json.dumps(
        {lang: profiles[lang].prompt_template for lang in sorted(profiles)},
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def evaluate(
    version: DatasetVersion,
    models,
    extractor: str,
    profiles: dict,
    gateway: Gateway,
    strict_errors: bool = False,
) -> ResultMatrix:
    """Prompt every model on every problem and score with one extractor.

    Unparseable extractions count as wrong but are tallied separately.
    Transport errors mark the problem as errored; by default errored counts
    as wrong, with ``strict_errors`` it is excluded from the denominator.
    """
    if extractor not in EXTRACTION_METHODS:
        raise ConfigError(f"unknown extractor: {extractor!r}")
    langs = version.languages()
    missing = [lang for lang in langs if lang not in profiles]
    if missing:
        raise ConfigError(f"no locale profile for languages: {missing}")

    cells = {}
    for spec in models:
        for lang in langs:
            profile = profiles[lang]
            verdicts = {}
            for qid in version.qids(lang):
                problem = version.get(qid, lang)
                prompt = build_prompt(problem, profile)
                try:
                    response = gateway.complete(spec, prompt)
                except (TransportError, ReplayMissError):
                    verdicts[qid] = ERRORED
                    continue
                outcome = extract(response, extractor, profile)
                if outcome.empty:
                    verdicts[qid] = UNPARSEABLE
                elif canonical_equal(outcome.value, problem.gold_answer):
                    verdicts[qid] = CORRECT
                else:
                    verdicts[qid] = WRONG
            total = len(verdicts)
            if strict_errors:
                total -= sum(1 for v in verdicts.values() if v == ERRORED)
            correct = sum(1 for v in verdicts.values() if v == CORRECT)
            cells[(spec.name, lang)] = CellResult(
                accuracy=accuracy_percent(correct, total),
                verdicts=verdicts,
            )

    return ResultMatrix(
        models=[spec.name for spec in models],
        langs=langs,
        cells=cells,
        dataset_version=version.version_id,
        extractor=extractor,
        prompt_config_hash=prompt_config_hash(profiles),
    )


@dataclass
class GapTable:
    models: list
    langs: list  # non-English languages, table order
    gaps: dict  # (model, lang) -> signed percent

    def gap(self, model: str, lang: str) -> float:
        return self.gaps[(model, lang)]


def compute_gap(matrix: ResultMatrix) -> GapTable:
    """gap(lang) = accuracy(en) - accuracy(lang), on rounded accuracies."""
    if "en" not in matrix.langs:
        raise ConfigError("gap computation requires an English column")
    langs = [lang for lang in matrix.langs if lang != "en"]
    gaps = {}
    for model in matrix.models:
        en_acc = matrix.accuracy(model, "en")
        for lang in langs:
            gaps[(model, lang)] = _decimal_diff(en_acc, matrix.accuracy(model, lang))
    return GapTable(models=list(matrix.models), langs=langs, gaps=gaps)


@dataclass
class DeltaTable:
    models: list
    langs: list
    deltas: dict  # (model, lang) -> acc_new - acc_old

    def delta(self, model: str, lang: str) -> float:
        return self.deltas[(model, lang)]


def compute_delta(old: ResultMatrix, new: ResultMatrix) -> DeltaTable:
    """Per-cell accuracy change between two runs, one-decimal arithmetic."""
    if set(old.models) != set(new.models) or set(old.langs) != set(new.langs):
        raise ConfigError("delta requires matching model and language axes")
    if set(old.cells) != set(new.cells):
        raise ConfigError("delta requires the same populated cells on both sides")
    deltas = {}
    for model, lang in old.cells:
        deltas[(model, lang)] = _decimal_diff(
            new.accuracy(model, lang), old.accuracy(model, lang)
        )
    return DeltaTable(models=list(old.models), langs=list(old.langs), deltas=deltas)


def evaluate_grid(versions, models, extractors, profiles, gateway) -> dict:
    """Evaluate every (dataset version, extractor) combination.

    Returns {(version_id, extractor): ResultMatrix} -- the 2x2 grid whose
    corners decompose the old-vs-new accuracy delta.
    """
    grid = {}
    for version in versions:
        for extractor in extractors:
            grid[(version.version_id, extractor)] = evaluate(
                version, models, extractor, profiles, gateway
            )
    return grid
