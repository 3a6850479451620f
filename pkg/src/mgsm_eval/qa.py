"""Semi-automatic dataset quality assurance.

The loop: problems that a majority of designated strong models get wrong are
flagged; non-English flagged items are machine-retranslated from the English
source, a judge model checks the retranslation preserves all facts, and the
strong models re-solve the candidate. Items that survive all three gates are
resolved into change records; anything that exhausts its rounds (or is an
English source problem, which needs manual rephrasing) lands in a human
review queue. Every state change goes through an append-only ledger so runs
can resume without repeating judge calls.
"""

import dataclasses
import hashlib
import json
import math
import re
import threading
from dataclasses import dataclass, field
from importlib import resources

from .dataset import ChangeRecord, DatasetVersion
from .engine import CORRECT, ConfigError, ResultMatrix, build_prompt
from .extraction import LOCALE_AWARE, canonical_equal, extract
from .gateway import (
    Gateway,
    MockExhaustedError,
    ModelSpec,
    ReplayMissError,
    TransportError,
)

# a translator or solver that cannot answer, for whatever reason, is a
# failed attempt for this round -- never a crash of the whole run
_MODEL_FAILURES = (TransportError, MockExhaustedError, ReplayMissError)

# Item states
FLAGGED = "flagged"
RETRANSLATED = "retranslated"
VERIFIED = "verified"
SOLVABLE = "solvable"
NEEDS_HUMAN = "needs_human"
RESOLVED = "resolved"
REJECTED = "rejected"

TERMINAL_STATES = (RESOLVED, REJECTED)

# flagged -> retranslated -> verified -> solvable -> resolved, with failed
# verification or solvability looping back to flagged for the next round;
# any state may escalate to needs_human, which a human resolves or rejects.
_LEGAL = {
    (FLAGGED, RETRANSLATED),
    (RETRANSLATED, VERIFIED),
    (RETRANSLATED, FLAGGED),
    (VERIFIED, SOLVABLE),
    (VERIFIED, FLAGGED),
    (SOLVABLE, RESOLVED),
    (NEEDS_HUMAN, RESOLVED),
    (NEEDS_HUMAN, REJECTED),
}

LANGUAGE_NAMES = {
    "en": "English",
    "bn": "Bengali",
    "de": "German",
    "es": "Spanish",
    "fr": "French",
    "ja": "Japanese",
    "ru": "Russian",
    "sw": "Swahili",
    "te": "Telugu",
    "th": "Thai",
    "zh": "Chinese",
}

_INTEGER_REPLY_RE = re.compile(r"\s*(\d+)\s*\Z")


class StateError(RuntimeError):
    """An illegal state-machine transition was attempted."""


class ClassificationError(ValueError):
    """Judge reply was not a lone integer in 1..6."""


def legal_transition(old: str, new: str) -> bool:
    return new == NEEDS_HUMAN or (old, new) in _LEGAL


@dataclass
class QAItem:
    qid: int
    lang: str
    state: str = FLAGGED
    round: int = 0
    candidate_text: str | None = None
    judge_verdicts: list = field(default_factory=list)  # (round, check, passed)
    human_decision: str | None = None  # "accept" | "edit" | "reject"
    resolved_text: str | None = None

    @property
    def key(self) -> str:
        return f"{self.lang}:{self.qid}"

    def transition(self, new_state: str) -> None:
        if not legal_transition(self.state, new_state):
            raise StateError(f"{self.key}: illegal transition {self.state} -> {new_state}")
        self.state = new_state


@dataclass
class FlagReport:
    threshold: float
    strong_models: list
    entries: dict = field(default_factory=dict)  # (qid, lang) -> (failing, total, flag)

    def flagged_keys(self) -> list:
        return sorted(
            (key for key, (_, _, flag) in self.entries.items() if flag),
            key=lambda key: (key[1], key[0]),
        )


def majority_fails(failures: int, total: int, threshold: float) -> bool:
    """Strict-majority rule: more than floor(total * threshold) failures."""
    return failures > math.floor(total * threshold)


def flag_problems(matrix: ResultMatrix, strong_models, threshold: float = 0.5):
    """Flag every (qid, lang) that a strong-model majority got wrong.

    English problems are flagged too; they feed manual review rather than
    retranslation.
    """
    strong_models = list(strong_models)
    if not strong_models:
        raise ConfigError("strong model set must be non-empty")
    unknown = [m for m in strong_models if m not in matrix.models]
    if unknown:
        raise ConfigError(f"strong models not in matrix: {unknown}")
    if not 0 < threshold < 1:
        raise ConfigError(f"threshold must be in (0, 1), got {threshold}")

    report = FlagReport(threshold=threshold, strong_models=strong_models)
    items = []
    for lang in matrix.langs:
        qids = sorted(matrix.cells[(strong_models[0], lang)].verdicts)
        for qid in qids:
            failing = [
                m
                for m in strong_models
                if matrix.cells[(m, lang)].verdicts.get(qid) != CORRECT
            ]
            flag = majority_fails(len(failing), len(strong_models), threshold)
            report.entries[(qid, lang)] = (failing, len(strong_models), flag)
            if flag:
                items.append(QAItem(qid=qid, lang=lang))
    return report, items


def _packaged_prompt(name: str) -> str:
    return resources.files("mgsm_eval.data").joinpath(name).read_text(encoding="utf-8")


@dataclass
class QAConfig:
    strong_models: list  # list of ModelSpec
    translator: ModelSpec
    judge: ModelSpec
    threshold: float = 0.5
    max_rounds: int = 3
    extractor: str = LOCALE_AWARE
    faithfulness_prompt: str = field(default_factory=lambda: _packaged_prompt("faithfulness_prompt.txt"))
    retranslation_prompt: str = field(default_factory=lambda: _packaged_prompt("retranslation_prompt.txt"))
    classification_prompt: str = field(default_factory=lambda: _packaged_prompt("classification_prompt.txt"))

    def config_hash(self) -> str:
        payload = json.dumps(
            [
                sorted(s.name for s in self.strong_models),
                self.threshold,
                self.max_rounds,
                self.extractor,
                self.faithfulness_prompt,
                self.retranslation_prompt,
            ],
            ensure_ascii=False,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def retranslate(item: QAItem, source_en: str, translator: ModelSpec, gateway: Gateway, template: str) -> str:
    """Produce a candidate retranslation of the English source.

    On success the item moves to ``retranslated`` with the candidate set;
    a transport failure or empty output leaves the item untouched.
    """
    if item.state != FLAGGED:
        raise StateError(f"{item.key}: retranslate requires state flagged, got {item.state}")
    if item.lang == "en":
        raise StateError("English items are reformulated by humans, not retranslated")
    prompt = template.replace("{language}", LANGUAGE_NAMES[item.lang]).replace("{source}", source_en)
    try:
        candidate = gateway.complete(translator, prompt)
    except _MODEL_FAILURES:
        return ""
    if not candidate.strip():
        return ""
    item.candidate_text = candidate.strip()
    item.transition(RETRANSLATED)
    return item.candidate_text


def verify_faithfulness(source_en: str, candidate: str, judge: ModelSpec, gateway: Gateway, template: str):
    """Ask the judge whether the candidate preserves all relevant facts.

    Returns (passed, reason). Anything other than a clear yes/no fails with
    an unparseable-verdict reason; it never silently passes.
    """
    if not candidate:
        raise ValueError("candidate must be non-empty")
    prompt = template.replace("{source}", source_en).replace("{candidate}", candidate)
    reply = gateway.complete(judge, prompt)
    first = reply.strip().split(None, 1)
    head = first[0].lower().rstrip(".,:;!") if first else ""
    if head == "yes":
        return True, reply.strip()
    if head == "no":
        return False, reply.strip()
    return False, f"unparseable verdict: {reply.strip()!r}"


def check_solvable(candidate: str, gold: str, config: QAConfig, profile, gateway: Gateway) -> bool:
    """Re-solve the candidate with the strong models; majority must succeed."""
    problem = _CandidateProblem(question=candidate)
    failures = 0
    for spec in config.strong_models:
        prompt = build_prompt(problem, profile)
        try:
            response = gateway.complete(spec, prompt)
        except _MODEL_FAILURES:
            failures += 1
            continue
        outcome = extract(response, config.extractor, profile)
        if outcome.empty or not canonical_equal(outcome.value, gold):
            failures += 1
    return not majority_fails(failures, len(config.strong_models), config.threshold)


@dataclass(frozen=True)
class _CandidateProblem:
    question: str


class QALedger:
    """Append-only event log; the single source of truth for item states."""

    def __init__(self, path):
        self.path = path
        self._lock = threading.Lock()

    def append(self, event: dict) -> None:
        with self._lock:
            with open(self.path, "a", encoding="utf-8", newline="\n") as fh:
                fh.write(json.dumps(event, ensure_ascii=False, sort_keys=True) + "\n")

    def events(self) -> list:
        try:
            with open(self.path, encoding="utf-8") as fh:
                return [json.loads(line) for line in fh if line.strip()]
        except FileNotFoundError:
            return []


class QARun:
    """Drives flagged items through the loop and records every transition."""

    def __init__(self, version: DatasetVersion, matrix: ResultMatrix, config: QAConfig,
                 gateway: Gateway, ledger: QALedger, profiles: dict):
        self.version = version
        self.matrix = matrix
        self.config = config
        self.gateway = gateway
        self.ledger = ledger
        self.profiles = profiles
        self.items: dict = {}  # (qid, lang) -> QAItem
        self.flag_report: FlagReport | None = None

    # -- ledger replay -----------------------------------------------------

    def load(self) -> None:
        """Rebuild item states from the ledger (resume support)."""
        for event in self.ledger.events():
            kind = event.get("event")
            if kind == "run_config":
                continue
            if kind == "flagged_item":
                key = (event["qid"], event["lang"])
                self.items.setdefault(key, QAItem(qid=event["qid"], lang=event["lang"]))
                continue
            if kind == "transition":
                key = (event["qid"], event["lang"])
                item = self.items.setdefault(key, QAItem(qid=event["qid"], lang=event["lang"]))
                item.state = event["to"]
                item.round = event.get("round", item.round)
                if "candidate" in event:
                    item.candidate_text = event["candidate"]
                if "verdict" in event:
                    item.judge_verdicts.append(
                        (event.get("round", 0), event.get("check", ""), event["verdict"])
                    )
                if "decision" in event:
                    item.human_decision = event["decision"]
                if "new_text" in event:
                    item.resolved_text = event["new_text"]

    def _record(self, item: QAItem, to_state: str, **payload) -> None:
        item.transition(to_state)
        event = {"event": "transition", "qid": item.qid, "lang": item.lang,
                 "to": to_state, "round": item.round}
        event.update(payload)
        self.ledger.append(event)

    # -- the loop ----------------------------------------------------------

    def flag(self) -> FlagReport:
        report, fresh = flag_problems(self.matrix, [s.name for s in self.config.strong_models],
                                      self.config.threshold)
        self.flag_report = report
        if fresh and not self.ledger.events():
            self.ledger.append({"event": "run_config", "hash": self.config.config_hash(),
                                "threshold": self.config.threshold,
                                "max_rounds": self.config.max_rounds})
        for item in fresh:
            key = (item.qid, item.lang)
            if key not in self.items:
                self.items[key] = item
                self.ledger.append({"event": "flagged_item", "qid": item.qid, "lang": item.lang})
        return report

    def process_all(self) -> None:
        """Run every non-terminal item to resolution, rejection, or the queue."""
        for key in sorted(self.items, key=lambda k: (k[1], k[0])):
            item = self.items[key]
            if item.state in TERMINAL_STATES or item.state == NEEDS_HUMAN:
                continue
            self._process(item)

    def _process(self, item: QAItem) -> None:
        if item.lang == "en":
            # ambiguous or wrong source text: humans rephrase it
            self._record(item, NEEDS_HUMAN, reason="english_source")
            return
        source_en = self.version.get(item.qid, "en").question
        gold = self.version.get(item.qid, item.lang).gold_answer
        profile = self.profiles[item.lang]

        while item.round < self.config.max_rounds:
            item.round += 1
            candidate = retranslate(item, source_en, self.config.translator,
                                    self.gateway, self.config.retranslation_prompt)
            if not candidate:
                self.ledger.append({"event": "retranslation_failed", "qid": item.qid,
                                    "lang": item.lang, "round": item.round})
                continue
            self.ledger.append({"event": "transition", "qid": item.qid, "lang": item.lang,
                                "to": RETRANSLATED, "round": item.round, "candidate": candidate})

            passed, reason = verify_faithfulness(source_en, candidate, self.config.judge,
                                                 self.gateway, self.config.faithfulness_prompt)
            item.judge_verdicts.append((item.round, "faithfulness", passed))
            if not passed:
                self._record(item, FLAGGED, check="faithfulness", verdict=False, reason=reason)
                continue
            self._record(item, VERIFIED, check="faithfulness", verdict=True)

            if check_solvable(candidate, gold, self.config, profile, self.gateway):
                item.judge_verdicts.append((item.round, "solvability", True))
                self._record(item, SOLVABLE, check="solvability", verdict=True)
                self._record(item, RESOLVED, new_text=candidate)
                item.resolved_text = candidate
                return
            item.judge_verdicts.append((item.round, "solvability", False))
            self._record(item, FLAGGED, check="solvability", verdict=False)

        self._record(item, NEEDS_HUMAN, reason="max_rounds_exhausted")

    # -- human decisions ---------------------------------------------------

    def apply_decision(self, qid: int, lang: str, action: str, new_text: str | None = None) -> QAItem:
        """Apply an accept / edit / reject decision from the review queue.

        Idempotent: repeating the identical decision is a no-op; a different
        decision on a decided item raises :class:`StateError`.
        """
        key = (qid, lang)
        if key not in self.items:
            raise KeyError(f"unknown QA item {lang}:{qid}")
        item = self.items[key]
        if action not in ("accept", "edit", "reject"):
            raise ValueError(f"unknown action {action!r}")
        if action == "edit" and not (new_text and new_text.strip()):
            raise ValueError("edit requires non-empty new_text")

        idem = self._decision_fingerprint(action, new_text)
        if item.state in TERMINAL_STATES:
            if item.human_decision == idem:
                return item  # identical repeat, no new ledger event
            raise StateError(f"{item.key}: already decided ({item.state})")
        if item.state != NEEDS_HUMAN:
            raise StateError(f"{item.key}: decisions require state needs_human, got {item.state}")

        item.human_decision = idem
        if action == "reject":
            self._record(item, REJECTED, decision=idem)
        else:
            resolved_text = new_text.strip() if action == "edit" else (item.candidate_text or "")
            item.resolved_text = resolved_text or None
            self._record(item, RESOLVED, decision=idem, new_text=resolved_text)
        return item

    @staticmethod
    def _decision_fingerprint(action: str, new_text: str | None) -> str:
        text_hash = hashlib.sha256((new_text or "").encode("utf-8")).hexdigest()[:12]
        return f"{action}:{text_hash}"

    # -- outputs -----------------------------------------------------------

    def change_records(self) -> list:
        records = []
        for key in sorted(self.items, key=lambda k: (k[1], k[0])):
            item = self.items[key]
            if item.state != RESOLVED or not item.resolved_text:
                continue
            old_text = self.version.get(item.qid, item.lang).question
            if item.resolved_text == old_text:
                continue
            records.append(ChangeRecord(qid=item.qid, lang=item.lang,
                                        old_text=old_text, new_text=item.resolved_text))
        return records


def run_qa(version: DatasetVersion, matrix: ResultMatrix, config: QAConfig,
           gateway: Gateway, ledger: QALedger, profiles: dict) -> QARun:
    """Flag, loop, and return the driver with its ledger fully written.

    Rerunning over an existing ledger resumes: terminal items are skipped and
    completed judge calls are not repeated.
    """
    run = QARun(version, matrix, config, gateway, ledger, profiles)
    run.load()
    run.flag()
    run.process_all()
    return run


def build_classification_prompt(old_text: str, new_text: str, answer: str, template: str) -> str:
    """Instantiate the category-classification prompt at its placeholders."""
    return (
        template.replace("{v1}", old_text)
        .replace("{v2}", new_text)
        .replace("{answer}", answer)
    )


def classify_change(old_text: str, new_text: str, answer: str, judge: ModelSpec,
                    gateway: Gateway, template: str | None = None) -> int:
    """Ask the judge for the 1..6 change category; strict integer parse."""
    if old_text == new_text:
        raise ValueError("classification requires old_text != new_text")
    template = template or _packaged_prompt("classification_prompt.txt")
    prompt = build_classification_prompt(old_text, new_text, answer, template)
    reply = gateway.complete(judge, prompt)
    match = _INTEGER_REPLY_RE.match(reply)
    if not match:
        raise ClassificationError(f"reply is not a lone integer: {reply!r}")
    category = int(match.group(1))
    if not 1 <= category <= 6:
        raise ClassificationError(f"category out of range 1..6: {category}")
    return category


def classify_records(records, judge: ModelSpec, gateway: Gateway, golds: dict,
                     template: str | None = None) -> list:
    """Classify a batch of change records; failures stay uncategorized."""
    out = []
    for rec in records:
        answer = golds.get((rec.qid, rec.lang), "")
        try:
            category = classify_change(rec.old_text, rec.new_text, answer, judge, gateway, template)
        except ClassificationError:
            out.append(rec)
            continue
        out.append(dataclasses.replace(rec, category=category))
    return out
