"""Per-language extraction and prompting configuration.

Each language gets a profile bundling the answer keyword, number separator
conventions, numeral system, and the prompt template used to query models.
Profiles live in an INI-style file so they can be edited without touching
code; the packaged default covers the 11 MGSM languages.
"""

import configparser
from dataclasses import dataclass, field
from importlib import resources

from .numerals import NUMERAL_SYSTEMS, WESTERN_ARABIC

MGSM_LANGUAGES = ("en", "bn", "de", "es", "fr", "ja", "ru", "sw", "te", "th", "zh")

QUESTION_PLACEHOLDER = "{question}"

# Separator characters that cannot be written literally in an INI value.
_SEPARATOR_TOKENS = {
    "space": " ",
    "nbsp": " ",
    "narrow-nbsp": " ",
}
_SEPARATOR_NAMES = {v: k for k, v in _SEPARATOR_TOKENS.items()}


class ProfileError(ValueError):
    """Raised for malformed locale profiles or profile files."""


@dataclass(frozen=True)
class LocaleProfile:
    lang_code: str
    answer_prefix: str
    decimal_separator: str
    thousands_separators: frozenset = field(default_factory=frozenset)
    numeral_system: str = WESTERN_ARABIC
    prompt_template: str = QUESTION_PLACEHOLDER

    def __post_init__(self):
        if self.lang_code not in MGSM_LANGUAGES:
            raise ProfileError(f"unknown language code: {self.lang_code!r}")
        if not self.answer_prefix:
            raise ProfileError(f"[{self.lang_code}] answer_prefix must be non-empty")
        if len(self.decimal_separator) != 1:
            raise ProfileError(
                f"[{self.lang_code}] decimal_separator must be a single character"
            )
        if self.decimal_separator in self.thousands_separators:
            raise ProfileError(
                f"[{self.lang_code}] decimal separator {self.decimal_separator!r}"
                " also listed as a thousands separator"
            )
        if any(len(c) != 1 for c in self.thousands_separators):
            raise ProfileError(
                f"[{self.lang_code}] thousands separators must be single characters"
            )
        if self.numeral_system not in NUMERAL_SYSTEMS:
            raise ProfileError(
                f"[{self.lang_code}] unknown numeral system: {self.numeral_system!r}"
            )
        if self.prompt_template.count(QUESTION_PLACEHOLDER) != 1:
            raise ProfileError(
                f"[{self.lang_code}] prompt_template must contain exactly one"
                f" {QUESTION_PLACEHOLDER} placeholder"
            )


def _encode_separators(seps) -> str:
    return " ".join(sorted(_SEPARATOR_NAMES.get(c, c) for c in seps))


def _decode_separators(raw: str) -> frozenset:
    chars = set()
    for token in raw.split():
        if token in _SEPARATOR_TOKENS:
            chars.add(_SEPARATOR_TOKENS[token])
        elif len(token) == 1:
            chars.add(token)
        else:
            raise ProfileError(f"unknown separator token: {token!r}")
    return frozenset(chars)


def load_profiles(path) -> dict:
    """Load locale profiles from an INI file, one section per language."""
    parser = configparser.ConfigParser(interpolation=None)
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    return _profiles_from_parser(parser)


def _profiles_from_parser(parser) -> dict:
    profiles = {}
    for section in parser.sections():
        sec = parser[section]
        try:
            profile = LocaleProfile(
                lang_code=section,
                answer_prefix=sec["answer_prefix"],
                decimal_separator=sec["decimal_separator"].strip('"'),
                thousands_separators=_decode_separators(sec.get("thousands_separators", "")),
                numeral_system=sec.get("numeral_system", WESTERN_ARABIC),
                prompt_template=sec["prompt_template"].replace("\\n", "\n"),
            )
        except KeyError as exc:
            raise ProfileError(f"[{section}] missing field {exc}") from None
        profiles[section] = profile
    return profiles


def save_profiles(profiles: dict, path) -> None:
    parser = configparser.ConfigParser(interpolation=None)
    for lang in sorted(profiles):
        p = profiles[lang]
        parser[lang] = {
            "answer_prefix": p.answer_prefix,
            "decimal_separator": f'"{p.decimal_separator}"',
            "thousands_separators": _encode_separators(p.thousands_separators),
            "numeral_system": p.numeral_system,
            "prompt_template": p.prompt_template.replace("\n", "\\n"),
        }
    with open(path, "w", encoding="utf-8") as fh:
        parser.write(fh)


def default_profiles() -> dict:
    """The packaged profile set for the 11 MGSM languages."""
    ref = resources.files("mgsm_eval.data").joinpath("profiles.ini")
    parser = configparser.ConfigParser(interpolation=None)
    parser.read_string(ref.read_text(encoding="utf-8"))
    return _profiles_from_parser(parser)
