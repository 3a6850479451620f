/** Thin typed client for the review API. All errors surface as ApiError so
 *  the views can show a banner instead of a stale success state. */

import { decisionKey } from "./idempotency.js";
import type { DecisionAction, QueueEntry } from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface QueuePage {
  entries: QueueEntry[];
  total: number;
}

export type FetchLike = typeof fetch;

export class ReviewApi {
  constructor(
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
    private readonly base: string = "",
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.base + path, init);
    } catch (err) {
      throw new ApiError(0, `API unreachable: ${String(err)}`);
    }
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        /* non-JSON error body; keep the status text */
      }
      throw new ApiError(response.status, detail);
    }
    return response;
  }

  async queue(offset = 0, limit?: number): Promise<QueuePage> {
    const params = new URLSearchParams({ offset: String(offset) });
    if (limit !== undefined) params.set("limit", String(limit));
    const response = await this.request(`/api/queue?${params}`);
    const entries = (await response.json()) as QueueEntry[];
    const header = response.headers.get("X-Total-Count");
    return { entries, total: header === null ? entries.length : Number(header) };
  }

  async decide(
    qid: number,
    lang: string,
    action: DecisionAction,
    newText: string | null = null,
  ): Promise<QueueEntry> {
    const key = await decisionKey(action, newText);
    const body: Record<string, unknown> = { action };
    if (newText !== null) body.new_text = newText;
    const response = await this.request(`/api/items/${qid}/${lang}/decision`, {
      method: "POST",
      headers: {
        "Content-Type": "application/json",
        "X-Idempotency-Key": key,
      },
      body: JSON.stringify(body),
    });
    return (await response.json()) as QueueEntry;
  }

  async reportCsv(runId = "current"): Promise<string> {
    const response = await this.request(`/api/runs/${runId}/report`, {
      headers: { Accept: "text/csv" },
    });
    return response.text();
  }
}
