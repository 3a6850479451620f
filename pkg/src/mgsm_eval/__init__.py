"""Multilingual numeric-benchmark evaluation harness.

Locale-aware numeric answer extraction, MGSM-format dataset management,
replayable model evaluation with accuracy/gap/delta tables, and a
semi-automatic dataset quality-assurance loop with a human review queue.
"""

from .dataset import ChangeRecord, DatasetVersion, Problem, diff_versions, load_tsv, validate
from .engine import (
    CellResult,
    ResultMatrix,
    build_prompt,
    compute_delta,
    compute_gap,
    evaluate,
    evaluate_grid,
)
from .extraction import (
    EXTRACTION_METHODS,
    ExtractionOutcome,
    canonical_equal,
    extract,
    extract_kaggle,
    extract_last_number,
    extract_locale_aware,
)
from .gateway import Gateway, ModelSpec, Transcript
from .numerals import normalize_numerals
from .profiles import LocaleProfile, default_profiles, load_profiles
from .qa import QAConfig, QALedger, classify_change, flag_problems, run_qa
from .report import render_accuracy_table, render_category_histogram, render_delta_table

__all__ = [
    "CellResult",
    "ChangeRecord",
    "DatasetVersion",
    "EXTRACTION_METHODS",
    "ExtractionOutcome",
    "Gateway",
    "LocaleProfile",
    "ModelSpec",
    "Problem",
    "QAConfig",
    "QALedger",
    "ResultMatrix",
    "Transcript",
    "build_prompt",
    "canonical_equal",
    "classify_change",
    "compute_delta",
    "compute_gap",
    "default_profiles",
    "diff_versions",
    "evaluate",
    "evaluate_grid",
    "extract",
    "extract_kaggle",
    "extract_last_number",
    "extract_locale_aware",
    "flag_problems",
    "load_profiles",
    "load_tsv",
    "normalize_numerals",
    "render_accuracy_table",
    "render_category_histogram",
    "render_delta_table",
    "run_qa",
    "validate",
]

__version__ = "0.1.0"
