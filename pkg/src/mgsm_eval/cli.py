"""Command-line entry point.

Offline-first: model access defaults to replay archives so nothing here
touches a network unless ``--live`` is passed with explicit endpoints.
Dataset directories hold one ``<lang>.tsv`` file per language.
"""

import functools
import json
import sys
from pathlib import Path

import click

from . import dataset as ds
from . import engine, report
from .extraction import EXTRACTION_METHODS, LOCALE_AWARE
from .gateway import HTTP_PROVIDER, REPLAY, Gateway, ModelSpec
from .profiles import default_profiles, load_profiles
from .qa import (
    ClassificationError,
    QAConfig,
    QALedger,
    QARun,
    classify_records,
    flag_problems,
    run_qa,
)

_FAIL_EXC = (
    ds.DatasetFormatError,
    engine.ConfigError,
    report.RenderError,
    ClassificationError,
    FileNotFoundError,
    ValueError,
)


def _fail_cleanly(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _FAIL_EXC as exc:
            raise click.ClickException(str(exc))

    return wrapper


def _load_dataset(directory: str, version_id: str) -> ds.DatasetVersion:
    path = Path(directory)
    fragments = []
    for tsv in sorted(path.glob("*.tsv")):
        fragments.append(ds.load_tsv(tsv, lang=tsv.stem, version_id=version_id))
    if not fragments:
        raise click.ClickException(f"no *.tsv files in {directory}")
    return ds.merge(*fragments, version_id=version_id)


def _profiles(path: str | None) -> dict:
    return load_profiles(path) if path else default_profiles()


def _model_specs(names: str, live: bool, endpoint: str) -> list:
    specs = []
    for name in [n.strip() for n in names.split(",") if n.strip()]:
        if live:
            specs.append(ModelSpec(name=name, backend=HTTP_PROVIDER, endpoint=endpoint))
        else:
            specs.append(ModelSpec(name=name, backend=REPLAY))
    if not specs:
        raise click.ClickException("no models given")
    return specs


@click.group()
def main():
    """Multilingual numeric-benchmark evaluation harness."""


# -- dataset ---------------------------------------------------------------

@main.group()
def dataset():
    """Load, validate, and diff dataset versions."""


@dataset.command("validate")
@click.argument("directory")
@click.option("--version-id", default="v1")
@_fail_cleanly
def dataset_validate(directory, version_id):
    version = _load_dataset(directory, version_id)
    rep = ds.validate(version)
    if not rep.ok:
        for finding in rep.findings:
            click.echo(f"FINDING: {finding}")
        raise click.ClickException(f"{len(rep.findings)} validation findings")
    langs = version.languages()
    counts = {len(version.qids(lang)) for lang in langs}
    count_str = str(counts.pop()) if len(counts) == 1 else "varying"
    click.echo(f"OK, {len(langs)} languages × {count_str} problems")


@dataset.command("diff")
@click.option("--old", "old_dir", required=True)
@click.option("--new", "new_dir", required=True)
@click.option("--out", default=None, help="write change records as JSONL")
@_fail_cleanly
def dataset_diff(old_dir, new_dir, out):
    old = _load_dataset(old_dir, "old")
    new = _load_dataset(new_dir, "new")
    records = ds.diff_versions(old, new)
    for rec in records:
        click.echo(f"{rec.lang} qid={rec.qid}")
    click.echo(f"{len(records)} changed problems")
    if out:
        ds.save_change_records(records, out)


# -- eval ------------------------------------------------------------------

@main.group("eval")
def eval_group():
    """Run evaluations and derive gap / delta tables."""


@eval_group.command("run")
@click.option("--dataset", "dataset_dir", required=True)
@click.option("--version-id", default="v1")
@click.option("--models", required=True, help="comma-separated model names")
@click.option("--archive", required=True, help="transcript archive (replay source)")
@click.option("--extractor", type=click.Choice(EXTRACTION_METHODS), default=LOCALE_AWARE)
@click.option("--profiles", "profiles_path", default=None)
@click.option("--out", required=True, help="output matrix JSON")
@click.option("--live", is_flag=True, help="query live endpoints instead of replay")
@click.option("--endpoint", default="", help="chat-completion endpoint for --live")
@click.option("--strict-errors", is_flag=True)
@_fail_cleanly
def eval_run(dataset_dir, version_id, models, archive, extractor, profiles_path,
             out, live, endpoint, strict_errors):
    version = _load_dataset(dataset_dir, version_id)
    specs = _model_specs(models, live, endpoint)
    gateway = Gateway.from_archive_file(archive)
    matrix = engine.evaluate(version, specs, extractor, _profiles(profiles_path),
                             gateway, strict_errors=strict_errors)
    matrix.save(out)
    for model in matrix.models:
        cells = " ".join(f"{lang}={matrix.accuracy(model, lang):.1f}" for lang in matrix.langs)
        click.echo(f"{model}: {cells}")


@eval_group.command("gap")
@click.option("--matrix", "matrix_path", required=True)
@click.option("--format", "fmt", type=click.Choice(report.FORMATS), default=report.TEXT)
@_fail_cleanly
def eval_gap(matrix_path, fmt):
    matrix = engine.ResultMatrix.load(matrix_path)
    gaps = engine.compute_gap(matrix)
    table = engine.DeltaTable(models=gaps.models, langs=gaps.langs, deltas=gaps.gaps)
    click.echo(report.render_delta_table(table, fmt), nl=False)


@eval_group.command("delta")
@click.option("--old", "old_path", required=True)
@click.option("--new", "new_path", required=True)
@click.option("--format", "fmt", type=click.Choice(report.FORMATS), default=report.TEXT)
@_fail_cleanly
def eval_delta(old_path, new_path, fmt):
    old = engine.ResultMatrix.load(old_path)
    new = engine.ResultMatrix.load(new_path)
    delta = engine.compute_delta(old, new)
    click.echo(report.render_delta_table(delta, fmt), nl=False)


@eval_group.command("report")
@click.option("--matrix", "matrix_path", required=True)
@click.option("--format", "fmt", type=click.Choice(report.FORMATS), default=report.TEXT)
@click.option("--out", default=None)
@_fail_cleanly
def eval_report(matrix_path, fmt, out):
    matrix = engine.ResultMatrix.load(matrix_path)
    gaps = engine.compute_gap(matrix)
    doc = report.render_accuracy_table(matrix, gaps, fmt)
    if out:
        Path(out).write_text(doc, encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(doc, nl=False)


# -- extract ---------------------------------------------------------------

@main.command("extract")
@click.option("--method", type=click.Choice(EXTRACTION_METHODS), required=True)
@click.option("--lang", required=True)
@click.option("--profiles", "profiles_path", default=None)
@click.argument("text")
@_fail_cleanly
def extract_cmd(method, lang, profiles_path, text):
    """Run one string through a chosen extractor (debugging aid)."""
    from .extraction import extract as run_extract

    profiles = _profiles(profiles_path)
    if lang not in profiles:
        raise click.ClickException(f"no profile for language {lang!r}")
    outcome = run_extract(text, method, profiles[lang])
    click.echo(outcome.value if outcome.value is not None else "")


# -- qa --------------------------------------------------------------------

@main.group()
def qa():
    """Dataset quality-assurance loop and review service."""


def _qa_config(strong, translator, judge, threshold, max_rounds, extractor):
    strong_specs = [ModelSpec(name=n.strip(), backend=REPLAY)
                    for n in strong.split(",") if n.strip()]
    return QAConfig(
        strong_models=strong_specs,
        translator=ModelSpec(name=translator, backend=REPLAY),
        judge=ModelSpec(name=judge, backend=REPLAY),
        threshold=threshold,
        max_rounds=max_rounds,
        extractor=extractor,
    )


@qa.command("flag")
@click.option("--matrix", "matrix_path", required=True)
@click.option("--strong", required=True, help="comma-separated strong model names")
@click.option("--threshold", type=float, default=0.5)
@_fail_cleanly
def qa_flag(matrix_path, strong, threshold):
    matrix = engine.ResultMatrix.load(matrix_path)
    names = [n.strip() for n in strong.split(",") if n.strip()]
    rep, items = flag_problems(matrix, names, threshold)
    for item in items:
        failing, total, _ = rep.entries[(item.qid, item.lang)]
        click.echo(f"{item.lang} qid={item.qid}: {len(failing)}/{total} strong models failed")
    click.echo(f"{len(items)} flagged")


@qa.command("auto")
@click.option("--dataset", "dataset_dir", required=True)
@click.option("--version-id", default="v1")
@click.option("--matrix", "matrix_path", required=True)
@click.option("--archive", required=True)
@click.option("--strong", required=True)
@click.option("--translator", default="translator")
@click.option("--judge", default="judge")
@click.option("--threshold", type=float, default=0.5)
@click.option("--max-rounds", type=int, default=3)
@click.option("--extractor", type=click.Choice(EXTRACTION_METHODS), default=LOCALE_AWARE)
@click.option("--ledger", "ledger_path", required=True)
@click.option("--profiles", "profiles_path", default=None)
@click.option("--out", default=None, help="write resolved change records as JSONL")
@_fail_cleanly
def qa_auto(dataset_dir, version_id, matrix_path, archive, strong, translator, judge,
            threshold, max_rounds, extractor, ledger_path, profiles_path, out):
    version = _load_dataset(dataset_dir, version_id)
    matrix = engine.ResultMatrix.load(matrix_path)
    gateway = Gateway.from_archive_file(archive)
    config = _qa_config(strong, translator, judge, threshold, max_rounds, extractor)
    run = run_qa(version, matrix, config, gateway, QALedger(ledger_path),
                 _profiles(profiles_path))
    states = {}
    for item in run.items.values():
        states[item.state] = states.get(item.state, 0) + 1
    click.echo(" ".join(f"{k}={v}" for k, v in sorted(states.items())) or "nothing flagged")
    if out:
        ds.save_change_records(run.change_records(), out)


@qa.command("classify")
@click.option("--records", "records_path", required=True)
@click.option("--dataset", "dataset_dir", required=True)
@click.option("--version-id", default="v2")
@click.option("--archive", required=True)
@click.option("--judge", default="judge")
@click.option("--out", required=True)
@_fail_cleanly
def qa_classify(records_path, dataset_dir, version_id, archive, judge, out):
    records = ds.load_change_records(records_path)
    version = _load_dataset(dataset_dir, version_id)
    golds = {(qid, lang): p.gold_answer for (qid, lang), p in version.problems.items()}
    gateway = Gateway.from_archive_file(archive)
    judge_spec = ModelSpec(name=judge, backend=REPLAY)
    classified = classify_records(records, judge_spec, gateway, golds)
    ds.save_change_records(classified, out)
    done = sum(1 for r in classified if r.category is not None)
    click.echo(f"classified {done}/{len(classified)} records")


@qa.command("serve")
@click.option("--dataset", "dataset_dir", required=True)
@click.option("--version-id", default="v1")
@click.option("--matrix", "matrix_path", required=True)
@click.option("--archive", required=True)
@click.option("--strong", required=True)
@click.option("--ledger", "ledger_path", required=True)
@click.option("--profiles", "profiles_path", default=None)
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
@click.option("--ui-dir", default=None, help="static UI bundle to serve at /")
@_fail_cleanly
def qa_serve(dataset_dir, version_id, matrix_path, archive, strong, ledger_path,
             profiles_path, host, port, ui_dir):
    import uvicorn

    from .api import ReviewService, create_app

    version = _load_dataset(dataset_dir, version_id)
    matrix = engine.ResultMatrix.load(matrix_path)
    gateway = Gateway.from_archive_file(archive)
    config = _qa_config(strong, "translator", "judge", 0.5, 3, LOCALE_AWARE)
    run = QARun(version, matrix, config, gateway, QALedger(ledger_path),
                _profiles(profiles_path))
    run.load()
    run.flag()
    app = create_app(ReviewService(run), ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    sys.exit(main())
