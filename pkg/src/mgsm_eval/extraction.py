"""Numeric answer extraction from model responses.

Three extractors are provided:

* ``kaggle_baseline`` -- keyword-anchored extraction as used by the public
  MGSM scoring code: everything before the last occurrence of the answer
  keyword is dropped, commas are deleted, and the last ``\\d+\\.?\\d*`` match
  wins (with trailing-zero stripping after a decimal point).
* ``last_number`` -- keyword-free extraction of the last digit sequence,
  tolerating commas, dots, and spaces inside the number. Faithful to its
  reference behavior, including the known flaw that genuine decimals other
  than ``.00``/``,00`` get their separator deleted ("42.5" -> "425").
* ``locale_aware`` -- separator-interpreting variant that reads the number
  under the language's decimal/thousands conventions and emits a canonical
  form.

All extractors are pure functions. Empty outcomes signal an unparseable
response, never an error.
"""

import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation

from .numerals import WESTERN_ARABIC, normalize_numerals
from .profiles import LocaleProfile

KAGGLE_BASELINE = "kaggle_baseline"
LAST_NUMBER = "last_number"
LOCALE_AWARE = "locale_aware"

EXTRACTION_METHODS = (KAGGLE_BASELINE, LAST_NUMBER, LOCALE_AWARE)

# The keyword-anchored reference runs under Python `re`, whose \d covers all
# unicode decimal digits; the last-number reference runs under an ASCII-digit
# engine. Both behaviors are kept as-is.
_KAGGLE_NUMBER_RE = re.compile(r"\d+\.?\d*")
_SPAN_RE = re.compile(r"[\d., ]+", re.ASCII)


class GoldAnswerError(ValueError):
    """Raised when a gold answer does not parse as a number."""


@dataclass(frozen=True)
class ExtractionOutcome:
    value: str | None  # canonical-ish numeric text, None if unparseable
    method: str
    raw_span: str = ""

    def __post_init__(self):
        # value absent <=> raw_span empty
        assert (self.value is None) == (self.raw_span == "")

    @property
    def empty(self) -> bool:
        return self.value is None


def _empty(method: str) -> ExtractionOutcome:
    return ExtractionOutcome(value=None, method=method, raw_span="")


def extract_kaggle(response: str, prefix: str) -> ExtractionOutcome:
    """Keyword-anchored extraction, matching the public scorer exactly."""
    if not prefix:
        raise ValueError("answer prefix must be non-empty")
    if prefix not in response:
        return _empty(KAGGLE_BASELINE)
    answer_text = response.split(prefix)[-1].strip()
    numbers = _KAGGLE_NUMBER_RE.findall(answer_text.replace(",", ""))
    if not numbers:
        return _empty(KAGGLE_BASELINE)
    raw = numbers[-1]
    value = raw.rstrip(".")
    if "." in value:
        value = value.rstrip("0").rstrip(".")
    if not value:
        return _empty(KAGGLE_BASELINE)
    return ExtractionOutcome(value=value, method=KAGGLE_BASELINE, raw_span=raw)


def _last_number_span(text: str) -> str | None:
    """Leftmost maximal run of [digits , . space] with no digit after it.

    Mirrors a non-backtracking search for ``([\\d., ]+)\\D*$``: among all
    maximal runs of span characters, the first one not followed by any
    further digit qualifies.
    """
    last_digit = -1
    for i, ch in enumerate(text):
        if ch.isascii() and ch.isdigit():
            last_digit = i
    for m in _SPAN_RE.finditer(text):
        if m.end() > last_digit:
            return m.group(0)
    return None


def extract_last_number(response: str, profile: LocaleProfile) -> ExtractionOutcome:
    """Keyword-free extraction of the last digit run in the response."""
    if profile.numeral_system != WESTERN_ARABIC:
        response = normalize_numerals(response, profile.numeral_system)
    span = _last_number_span(response)
    if span is None:
        return _empty(LAST_NUMBER)
    value = span.replace(" ", "")
    if value.endswith(".00") or value.endswith(",00"):
        value = value[:-3]
    value = value.replace(",", "").replace(".", "")
    if not value:
        return _empty(LAST_NUMBER)
    return ExtractionOutcome(value=value, method=LAST_NUMBER, raw_span=span)


def _canonicalize_integer_part(digits: str) -> str:
    stripped = digits.lstrip("0")
    return stripped if stripped else "0"


def extract_locale_aware(response: str, profile: LocaleProfile) -> ExtractionOutcome:
    """Separator-interpreting extraction under the profile's conventions."""
    if profile.numeral_system != WESTERN_ARABIC:
        response = normalize_numerals(response, profile.numeral_system)
    separators = set(profile.thousands_separators) | {profile.decimal_separator}
    token_re = re.compile(
        "[0-9%s]+" % re.escape("".join(sorted(separators)))
    )
    token = None
    for m in token_re.finditer(response):
        if any(c.isdigit() for c in m.group(0)):
            token = m.group(0)
    if token is None:
        return _empty(LOCALE_AWARE)
    raw = token
    token = token.strip("".join(separators))
    for sep in profile.thousands_separators:
        token = token.replace(sep, "")
    dec = profile.decimal_separator
    if token.count(dec) == 1:
        intpart, frac = token.split(dec)
        if intpart and frac:
            intpart = _canonicalize_integer_part(intpart)
            if frac.strip("0"):
                value = f"{intpart}.{frac}"
            else:
                value = intpart
        else:
            # dangling separator: treat as grouping noise
            value = _canonicalize_integer_part(intpart + frac)
    else:
        # zero or repeated decimal separators: grouped digits
        value = _canonicalize_integer_part(token.replace(dec, ""))
    if not any(c.isdigit() for c in value):
        return _empty(LOCALE_AWARE)
    return ExtractionOutcome(value=value, method=LOCALE_AWARE, raw_span=raw)


def extract(response: str, method: str, profile: LocaleProfile) -> ExtractionOutcome:
    """Dispatch to one of the three extractors by method name."""
    if method == KAGGLE_BASELINE:
        return extract_kaggle(response, profile.answer_prefix)
    if method == LAST_NUMBER:
        return extract_last_number(response, profile)
    if method == LOCALE_AWARE:
        return extract_locale_aware(response, profile)
    raise ValueError(f"unknown extraction method: {method!r}")


def parse_gold(gold: str) -> Decimal:
    """Parse a gold answer, tolerating grouping commas.

    Raises :class:`GoldAnswerError` for non-numeric golds; this is a dataset
    problem and should be surfaced before evaluation.
    """
    cleaned = gold.strip().replace(",", "")
    try:
        return Decimal(cleaned)
    except InvalidOperation:
        raise GoldAnswerError(f"gold answer is not numeric: {gold!r}") from None


def canonical_equal(pred: str, gold: str) -> bool:
    """True iff pred and gold denote the same numeric value."""
    gold_value = parse_gold(gold)
    try:
        pred_value = Decimal(pred)
    except InvalidOperation:
        return False
    return pred_value == gold_value
