"""A tour of the three answer extractors.

Runs the same multilingual model responses through each extraction method so
the failure modes are visible side by side: the baseline drops answers whose
locale prefix is missing and mangles European thousands separators, the
language-agnostic scanner recovers those but flattens real decimals, and the
locale-aware parser resolves separators from the language profile.
"""

from mgsm_eval import EXTRACTION_METHODS, default_profiles, extract

SAMPLES = [
    ("en", "Answer: 2.000."),
    ("fr", "La réponse est 2.000."),
    ("de", "Antwort: 1 234,00 Euro kostet es"),
    ("bn", "উত্তর: ১২৩"),
    ("en", "Answer: 42.50"),
    ("es", "Respuesta: 1.000.000"),
    ("ru", "Ответ: 2 500,75"),
    ("ja", "答え: 3000"),
]


def main() -> None:
    profiles = default_profiles()
    width = max(len(text) for _, text in SAMPLES)
    header = f"{'lang':<5} {'response':<{width}} " + "  ".join(
        f"{m:<16}" for m in EXTRACTION_METHODS
    )
    print(header)
    print("-" * len(header))
    for lang, text in SAMPLES:
        values = []
        for method in EXTRACTION_METHODS:
            outcome = extract(text, method, profiles[lang])
            values.append(outcome.value if outcome.value is not None else "(none)")
        print(f"{lang:<5} {text:<{width}} " + "  ".join(f"{v:<16}" for v in values))


if __name__ == "__main__":
    main()
