"""Numeral-system normalization.

Bengali model outputs frequently use the native digit set (০-৯) instead of
western-arabic digits, so responses are normalized through a one-to-one digit
mapping before any numeric extraction runs.
"""

NumeralSystem = str  # "western_arabic" | "bengali"

WESTERN_ARABIC = "western_arabic"
BENGALI = "bengali"

NUMERAL_SYSTEMS = (WESTERN_ARABIC, BENGALI)

# ০..৯ (U+09E6..U+09EF) -> 0..9
BENGALI_TO_WESTERN = {chr(0x09E6 + i): str(i) for i in range(10)}
WESTERN_TO_BENGALI = {v: k for k, v in BENGALI_TO_WESTERN.items()}

_BENGALI_TABLE = str.maketrans(BENGALI_TO_WESTERN)
_INVERSE_TABLE = str.maketrans(WESTERN_TO_BENGALI)


def normalize_numerals(text: str, system: NumeralSystem) -> str:
    """Replace every digit of `system` with its western-arabic equivalent.

    All other characters pass through unchanged; the result has the same
    length in code points as the input.
    """
    if system == WESTERN_ARABIC:
        return text
    if system == BENGALI:
        return text.translate(_BENGALI_TABLE)
    raise ValueError(f"unknown numeral system: {system!r}")


def denormalize_numerals(text: str, system: NumeralSystem) -> str:
    """Inverse of :func:`normalize_numerals` on the digit domain."""
    if system == WESTERN_ARABIC:
        return text
    if system == BENGALI:
        return text.translate(_INVERSE_TABLE)
    raise ValueError(f"unknown numeral system: {system!r}")
