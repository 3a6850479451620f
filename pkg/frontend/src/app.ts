/** Screen controller: owns the API client, the current queue snapshot, and
 *  hash-based navigation between queue, item, and summary screens. */

import { ApiError, ReviewApi } from "./api.js";
import { parseHistogramCsv } from "./csv.js";
import type { DecisionAction, QueueEntry } from "./types.js";
import {
  clearErrors,
  errorBanner,
  renderItem,
  renderQueue,
  renderSummary,
} from "./views.js";

export class App {
  private entries: QueueEntry[] = [];
  private total = 0;
  private langFilter = "all";

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ReviewApi,
  ) {}

  async showQueue(): Promise<void> {
    try {
      const page = await this.api.queue();
      this.entries = page.entries;
      this.total = page.total;
    } catch (err) {
      this.renderQueueScreen();
      this.fail(err);
      return;
    }
    this.renderQueueScreen();
  }

  private renderQueueScreen(): void {
    renderQueue(this.root, this.entries, this.total, this.langFilter, {
      onOpen: (entry) => this.showItem(entry),
      onFilter: (lang) => {
        this.langFilter = lang;
        this.renderQueueScreen();
      },
      onRefresh: () => {
        void this.showQueue();
      },
    });
  }

  showItem(entry: QueueEntry): void {
    renderItem(this.root, entry, {
      onDecide: (action, newText) => {
        void this.decide(entry, action, newText);
      },
      onBack: () => {
        void this.showQueue();
      },
    });
  }

  private async decide(
    entry: QueueEntry,
    action: DecisionAction,
    newText: string | null,
  ): Promise<void> {
    clearErrors(this.root);
    try {
      await this.api.decide(entry.qid, entry.lang, action, newText);
    } catch (err) {
      // surface conflicts verbatim and re-enable the form
      this.showItem(entry);
      this.fail(err);
      return;
    }
    await this.showQueue();
  }

  async showSummary(runId = "current"): Promise<void> {
    let csv: string;
    try {
      csv = await this.api.reportCsv(runId);
    } catch (err) {
      renderSummary(this.root, [], () => void this.showQueue());
      this.fail(err);
      return;
    }
    renderSummary(this.root, parseHistogramCsv(csv), () => void this.showQueue());
  }

  private fail(err: unknown): void {
    const message =
      err instanceof ApiError ? `Error ${err.status || ""}: ${err.message}` : String(err);
    errorBanner(this.root, message.trim());
  }
}

export function start(root: HTMLElement, api: ReviewApi = new ReviewApi()): App {
  const app = new App(root, api);
  const route = () => {
    const hash = window.location.hash;
    if (hash.startsWith("#/summary")) {
      void app.showSummary();
    } else {
      void app.showQueue();
    }
  };
  window.addEventListener("hashchange", route);
  route();
  return app;
}
