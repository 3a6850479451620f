"""Rendering of accuracy, delta, and change-category artifacts.

Every renderer is a pure function of its inputs and emits deterministic
output in one of three formats: a plain-text grid, CSV, or standalone HTML
(with red background shading proportional to the per-cell gap).
"""

import csv
import html
import io

from .profiles import MGSM_LANGUAGES

TEXT = "text"
CSV = "csv"
HTML = "html"

FORMATS = (TEXT, CSV, HTML)

# Full shade at a 35-point gap, roughly the largest common gap seen in
# uncorrected runs; configurable because the scale is a rendering choice.
DEFAULT_SHADE_SLOPE = 1.0 / 35.0


class RenderError(ValueError):
    """Unknown output format or mismatched table axes."""


def shade_intensity(gap: float, slope: float = DEFAULT_SHADE_SLOPE) -> float:
    """clamp(slope * gap, 0, 1); zero for English / non-positive gaps."""
    return min(1.0, max(0.0, slope * gap))


def _table_langs(langs) -> list:
    """Fixed column order: the canonical 11-language order, then extras."""
    ordered = [lang for lang in MGSM_LANGUAGES if lang in langs]
    ordered += sorted(set(langs) - set(MGSM_LANGUAGES))
    return ordered


def _check_format(fmt: str) -> None:
    if fmt not in FORMATS:
        raise RenderError(f"unknown format: {fmt!r}")


def _fmt_cell(value: float) -> str:
    return f"{value:.1f}"


def _text_grid(header, rows) -> str:
    widths = [max(len(str(row[i])) for row in [header] + rows) for i in range(len(header))]
    lines = []
    for row in [header] + rows:
        lines.append("  ".join(str(cell).rjust(w) for cell, w in zip(row, widths)))
    return "\n".join(lines) + "\n"


def _csv_doc(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_NONNUMERIC, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _html_doc(title, header, rows, shades=None) -> str:
    parts = [
        "<!DOCTYPE html>",
        '<html><head><meta charset="utf-8">',
        f"<title>{html.escape(title)}</title>",
        "<style>table{border-collapse:collapse}td,th{border:1px solid #999;"
        "padding:4px 8px;text-align:right}th:first-child,td:first-child{text-align:left}</style>",
        "</head><body>",
        f"<h1>{html.escape(title)}</h1>",
        "<table>",
        "<tr>" + "".join(f"<th>{html.escape(str(h))}</th>" for h in header) + "</tr>",
    ]
    for i, row in enumerate(rows):
        cells = []
        for j, value in enumerate(row):
            style = ""
            if shades is not None and j > 0:
                intensity = shades[i][j - 1]
                if intensity > 0:
                    alpha = round(intensity, 3)
                    style = f' style="background:rgba(255,0,0,{alpha})"'
            cells.append(f"<td{style}>{html.escape(str(value))}</td>")
        parts.append("<tr>" + "".join(cells) + "</tr>")
    parts += ["</table>", "</body></html>"]
    return "\n".join(parts) + "\n"


def render_accuracy_table(matrix, gap_table, fmt: str = TEXT,
                          shade_slope: float = DEFAULT_SHADE_SLOPE) -> str:
    """Model x language accuracy grid, shaded by distance to English."""
    _check_format(fmt)
    if set(gap_table.models) != set(matrix.models):
        raise RenderError("matrix and gap table cover different models")
    langs = _table_langs(matrix.langs)
    header = ["system"] + langs
    rows, shades = [], []
    for model in matrix.models:
        row = [model]
        row_shades = []
        for lang in langs:
            row.append(_fmt_cell(matrix.accuracy(model, lang)))
            gap = 0.0 if lang == "en" else gap_table.gaps.get((model, lang), 0.0)
            row_shades.append(shade_intensity(gap, shade_slope))
        rows.append(row)
        shades.append(row_shades)
    if fmt == TEXT:
        return _text_grid(header, rows)
    if fmt == CSV:
        return _csv_doc(header, rows)
    return _html_doc(f"Accuracy ({matrix.dataset_version}, {matrix.extractor})",
                     header, rows, shades)


def render_delta_table(delta, fmt: str = TEXT) -> str:
    """Per-model accuracy change row, in canonical language order."""
    _check_format(fmt)
    langs = _table_langs(delta.langs)
    missing = [lang for lang in langs if any((m, lang) not in delta.deltas for m in delta.models)]
    if missing:
        raise RenderError(f"delta table missing columns: {missing}")
    header = ["system"] + langs
    rows = [
        [model] + [_fmt_cell(delta.delta(model, lang)) for lang in langs]
        for model in delta.models
    ]
    if fmt == TEXT:
        return _text_grid(header, rows)
    if fmt == CSV:
        return _csv_doc(header, rows)
    return _html_doc("Accuracy delta", header, rows)


UNCLASSIFIED = "unclassified"


def category_counts(records) -> dict:
    """{lang: {category-or-'unclassified': count}}, nothing dropped."""
    counts: dict = {}
    for rec in records:
        bucket = rec.category if rec.category is not None else UNCLASSIFIED
        counts.setdefault(rec.lang, {}).setdefault(bucket, 0)
        counts[rec.lang][bucket] += 1
    return counts


def render_category_histogram(records, fmt: str = TEXT) -> str:
    """Per-language stacked counts over the six change categories."""
    _check_format(fmt)
    counts = category_counts(records)
    langs = _table_langs(counts.keys())
    buckets = [1, 2, 3, 4, 5, 6, UNCLASSIFIED]
    header = ["lang"] + [f"cat{b}" if b != UNCLASSIFIED else UNCLASSIFIED for b in buckets] + ["total"]
    rows = []
    for lang in langs:
        per = counts.get(lang, {})
        values = [per.get(b, 0) for b in buckets]
        rows.append([lang] + values + [sum(values)])
    if fmt == TEXT:
        if not rows:
            return _text_grid(header, [])
        return _text_grid(header, rows)
    if fmt == CSV:
        return _csv_doc(header, rows)
    return _html_doc("Change categories per language", header, rows)
