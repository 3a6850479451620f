"""HTTP review service for the human QA queue.

A thin JSON layer over the QA run: list items waiting on a human, accept an
accept/edit/reject decision (serialized through the ledger appender), and
serve rendered reports. The service holds no state the ledger cannot
reconstruct. Optionally serves a static UI bundle at the root path.
"""

import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.responses import HTMLResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .engine import build_prompt
from .extraction import extract
from .qa import NEEDS_HUMAN, QARun, StateError
from . import report as report_gen


class DecisionBody(BaseModel):
    action: str
    new_text: str | None = None


class ReviewService:
    """Bridges HTTP requests to a QA run; decisions go through one lock."""

    def __init__(self, run: QARun):
        self.run = run
        self.runs = {"current": run}
        self._decision_lock = threading.Lock()

    # -- queue -------------------------------------------------------------

    def queue_entries(self):
        entries = []
        for key in sorted(self.run.items, key=lambda k: (k[1], k[0])):
            item = self.run.items[key]
            if item.state != NEEDS_HUMAN:
                continue
            entries.append(self.entry_for(item))
        return entries

    def entry_for(self, item):
        qid, lang = item.qid, item.lang
        version = self.run.version
        source_en = ""
        if (qid, "en") in version.problems:
            source_en = version.get(qid, "en").question
        current = ""
        if (qid, lang) in version.problems:
            current = version.get(qid, lang).question
        return {
            "qid": qid,
            "lang": lang,
            "state": item.state,
            "round": item.round,
            "source_en": source_en,
            "current_text": current,
            "candidate_text": item.candidate_text,
            "transcripts": self._failing_transcripts(qid, lang),
            "proposed_category": None,
        }

    def _failing_transcripts(self, qid, lang):
        """Model responses behind the flag, with the extracted span echoed."""
        report = self.run.flag_report
        if report is None or (qid, lang) not in report.entries:
            return []
        failing, _, _ = report.entries[(qid, lang)]
        profile = self.run.profiles.get(lang)
        if profile is None or (qid, lang) not in self.run.version.problems:
            return []
        problem = self.run.version.get(qid, lang)
        prompt = build_prompt(problem, profile)
        transcripts = []
        spec_by_name = {s.name: s for s in self.run.config.strong_models}
        for model in failing:
            spec = spec_by_name.get(model)
            if spec is None:
                continue
            cached = self.run.gateway.archive.get(spec.cache_key(prompt))
            if cached is None:
                continue
            outcome = extract(cached.response, self.run.config.extractor, profile)
            transcripts.append({
                "model": model,
                "response": cached.response,
                "extracted": outcome.value,
                "raw_span": outcome.raw_span,
            })
        return transcripts

    # -- decisions ---------------------------------------------------------

    def decide(self, qid, lang, action, new_text):
        with self._decision_lock:
            item = self.run.apply_decision(qid, lang, action, new_text)
        return self.entry_for(item)


def create_app(service: ReviewService, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="QA review")

    @app.get("/api/queue")
    def queue(response: Response, offset: int = 0, limit: int | None = None):
        entries = service.queue_entries()
        response.headers["X-Total-Count"] = str(len(entries))
        if limit is None:
            return entries[offset:]
        return entries[offset : offset + limit]

    @app.post("/api/items/{qid}/{lang}/decision")
    def decide(qid: int, lang: str, body: DecisionBody):
        if (qid, lang) not in service.run.items:
            raise HTTPException(status_code=404, detail=f"unknown item {lang}:{qid}")
        try:
            return service.decide(qid, lang, body.action, body.new_text)
        except StateError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.get("/api/runs/{run_id}/report")
    def run_report(run_id: str, request: Request):
        run = service.runs.get(run_id)
        if run is None:
            raise HTTPException(status_code=404, detail=f"unknown run {run_id!r}")
        records = run.change_records()
        accept = request.headers.get("accept", "")
        if "text/csv" in accept:
            doc = report_gen.render_category_histogram(records, report_gen.CSV)
            return PlainTextResponse(doc, media_type="text/csv")
        doc = report_gen.render_category_histogram(records, report_gen.HTML)
        return HTMLResponse(doc)

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
