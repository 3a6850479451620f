/** DOM rendering for the three screens. Framework-free: each function clears
 *  its container and rebuilds it from API data; every number shown comes from
 *  the API verbatim. */

import type { HistogramRow, QueueEntry, TranscriptView } from "./types.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function errorBanner(container: HTMLElement, message: string): void {
  const banner = el("div", "error-banner", message);
  banner.setAttribute("role", "alert");
  container.prepend(banner);
}

export function clearErrors(container: HTMLElement): void {
  container.querySelectorAll(".error-banner").forEach((n) => n.remove());
}

export interface QueueCallbacks {
  onOpen: (entry: QueueEntry) => void;
  onFilter: (lang: string) => void;
  onRefresh: () => void;
}

export function renderQueue(
  container: HTMLElement,
  entries: QueueEntry[],
  total: number,
  langFilter: string,
  callbacks: QueueCallbacks,
): void {
  container.replaceChildren();
  const heading = el("h1", "", "Review queue");
  container.append(heading);

  const toolbar = el("div", "toolbar");
  const label = el("label", "", "Language: ");
  const select = el("select");
  select.dataset.testid = "lang-filter";
  const languages = ["all", ...new Set(entries.map((e) => e.lang))];
  for (const lang of languages) {
    const option = el("option", "", lang);
    option.value = lang;
    if (lang === langFilter) option.selected = true;
    select.append(option);
  }
  select.addEventListener("change", () => callbacks.onFilter(select.value));
  label.append(select);
  const refresh = el("button", "", "Refresh");
  refresh.dataset.testid = "refresh";
  refresh.addEventListener("click", callbacks.onRefresh);
  const count = el("span", "queue-total", `${total} item(s) waiting`);
  count.dataset.testid = "queue-total";
  toolbar.append(label, refresh, count);
  container.append(toolbar);

  const visible =
    langFilter === "all" ? entries : entries.filter((e) => e.lang === langFilter);
  if (visible.length === 0) {
    container.append(el("p", "empty-state", "The queue is empty. Nothing needs review."));
    return;
  }
  const list = el("ul", "queue-list");
  for (const entry of visible) {
    const item = el("li", "queue-row");
    item.dataset.testid = "queue-row";
    const link = el("a", "", `${entry.lang} · problem ${entry.qid}`);
    link.href = `#/item/${entry.qid}/${entry.lang}`;
    link.addEventListener("click", (event) => {
      event.preventDefault();
      callbacks.onOpen(entry);
    });
    const badge = el("span", `badge badge-${entry.state}`, entry.state);
    badge.dataset.testid = "state-badge";
    item.append(link, badge, el("span", "round", `round ${entry.round}`));
    list.append(item);
  }
  container.append(list);
}

function transcriptBlock(transcript: TranscriptView): HTMLElement {
  const block = el("div", "transcript");
  block.append(el("div", "transcript-model", transcript.model));
  const pre = el("pre", "transcript-text");
  const span = transcript.raw_span;
  const index = span ? transcript.response.indexOf(span) : -1;
  if (index >= 0 && span) {
    pre.append(document.createTextNode(transcript.response.slice(0, index)));
    const mark = el("mark", "extracted-span", span);
    mark.title = `extracted: ${transcript.extracted ?? "(none)"}`;
    pre.append(mark);
    pre.append(document.createTextNode(transcript.response.slice(index + span.length)));
  } else {
    pre.textContent = transcript.response;
  }
  block.append(pre);
  block.append(
    el("div", "transcript-extracted", `extracted: ${transcript.extracted ?? "(none)"}`),
  );
  return block;
}

export interface ItemCallbacks {
  onDecide: (action: "accept" | "edit" | "reject", newText: string | null) => void;
  onBack: () => void;
}

export function renderItem(
  container: HTMLElement,
  entry: QueueEntry,
  callbacks: ItemCallbacks,
): void {
  container.replaceChildren();
  const back = el("a", "back-link", "← queue");
  back.href = "#/queue";
  back.addEventListener("click", (event) => {
    event.preventDefault();
    callbacks.onBack();
  });
  container.append(back);
  container.append(el("h1", "", `${entry.lang} · problem ${entry.qid}`));
  const badge = el("span", `badge badge-${entry.state}`, entry.state);
  badge.dataset.testid = "state-badge";
  container.append(badge);

  const panels = el("div", "panels");
  const columns: Array<[string, string]> = [
    ["English source", entry.source_en],
    ["Current translation", entry.current_text],
    ["Candidate retranslation", entry.candidate_text ?? "(no candidate)"],
  ];
  for (const [title, text] of columns) {
    const panel = el("section", "panel");
    panel.append(el("h2", "", title));
    panel.append(el("p", "panel-text", text));
    panels.append(panel);
  }
  container.append(panels);

  const transcripts = el("section", "transcripts");
  transcripts.append(el("h2", "", "Failing model transcripts"));
  if (entry.transcripts.length === 0) {
    transcripts.append(el("p", "empty-state", "No transcripts recorded."));
  } else {
    for (const transcript of entry.transcripts) {
      transcripts.append(transcriptBlock(transcript));
    }
  }
  container.append(transcripts);

  const form = el("form", "decision-form");
  const textarea = el("textarea");
  textarea.dataset.testid = "edit-text";
  textarea.placeholder = "Edited question text (required for edit)";
  if (entry.candidate_text) textarea.value = entry.candidate_text;

  const validation = el("p", "validation-error");
  validation.dataset.testid = "validation-error";
  validation.hidden = true;

  const buttons = el("div", "decision-buttons");
  for (const action of ["accept", "edit", "reject"] as const) {
    const button = el("button", `decision decision-${action}`, action);
    button.type = "button";
    button.dataset.testid = `decide-${action}`;
    button.addEventListener("click", () => {
      validation.hidden = true;
      if (action === "edit" && textarea.value.trim() === "") {
        validation.textContent = "Edit requires non-empty text.";
        validation.hidden = false;
        return;
      }
      // disable all buttons so a double-click can never post twice
      buttons.querySelectorAll("button").forEach((b) => (b.disabled = true));
      callbacks.onDecide(action, action === "edit" ? textarea.value : null);
    });
    buttons.append(button);
  }
  form.append(textarea, validation, buttons);
  form.addEventListener("submit", (event) => event.preventDefault());
  container.append(form);
}

export function renderSummary(
  container: HTMLElement,
  rows: HistogramRow[],
  onBack: () => void,
): void {
  container.replaceChildren();
  const back = el("a", "back-link", "← queue");
  back.href = "#/queue";
  back.addEventListener("click", (event) => {
    event.preventDefault();
    onBack();
  });
  container.append(back);
  container.append(el("h1", "", "Change categories"));
  if (rows.length === 0) {
    container.append(el("p", "empty-state", "No change records yet."));
    return;
  }
  const chart = el("div", "histogram");
  for (const row of rows) {
    const rowEl = el("div", "histogram-row");
    rowEl.dataset.testid = "histogram-row";
    rowEl.append(el("span", "histogram-lang", row.lang));
    const bars = el("div", "histogram-bars");
    for (const [bucket, count] of Object.entries(row.buckets)) {
      if (count === 0) continue;
      const bar = el("span", `bar bar-${bucket}`, `${bucket}: ${count}`);
      bar.dataset.testid = "histogram-bar";
      bar.dataset.count = String(count);
      bar.style.flexGrow = String(count);
      bars.append(bar);
    }
    rowEl.append(bars);
    const total = el("span", "histogram-total", String(row.total));
    total.dataset.testid = "histogram-total";
    rowEl.append(total);
    chart.append(rowEl);
  }
  container.append(chart);
}
