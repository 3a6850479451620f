import { describe, expect, it } from "vitest";

import { ApiError, ReviewApi } from "../src/api.js";
import { decisionKey, sha256Hex } from "../src/idempotency.js";
import { FixtureApi, makeEntry } from "./fixture-api.js";

describe("ReviewApi", () => {
  it("reads queue entries and the total header", async () => {
    const fixture = new FixtureApi({
      entries: [makeEntry({ qid: 1 }), makeEntry({ qid: 2 }), makeEntry({ qid: 3 })],
    });
    const api = new ReviewApi(fixture.fetch);
    const page = await api.queue();
    expect(page.entries).toHaveLength(3);
    expect(page.total).toBe(3);
  });

  it("paginates while reporting the full total", async () => {
    const fixture = new FixtureApi({
      entries: [makeEntry({ qid: 1 }), makeEntry({ qid: 2 }), makeEntry({ qid: 3 })],
    });
    const api = new ReviewApi(fixture.fetch);
    const page = await api.queue(1, 1);
    expect(page.entries).toHaveLength(1);
    expect(page.entries[0]?.qid).toBe(2);
    expect(page.total).toBe(3);
  });

  it("maps HTTP errors to ApiError with the server detail", async () => {
    const fixture = new FixtureApi();
    const api = new ReviewApi(fixture.fetch);
    await expect(api.decide(9, "de", "accept")).rejects.toMatchObject({
      name: "ApiError",
      status: 404,
    });
  });

  it("wraps network failures as status 0", async () => {
    const api = new ReviewApi(() => Promise.reject(new Error("refused")));
    await expect(api.queue()).rejects.toSatisfy(
      (err: unknown) => err instanceof ApiError && err.status === 0,
    );
  });

  it("fetches the report as CSV text", async () => {
    const fixture = new FixtureApi({ histogramCsv: '"lang","total"\n"de",1\n' });
    const api = new ReviewApi(fixture.fetch);
    await expect(api.reportCsv()).resolves.toContain('"de",1');
    await expect(api.reportCsv("nope")).rejects.toMatchObject({ status: 404 });
  });
});

describe("idempotency key", () => {
  it("mirrors the server fingerprint format", async () => {
    // sha256("") starts with e3b0c44298fc
    expect(await sha256Hex("")).toMatch(/^e3b0c44298fc/);
    expect(await decisionKey("accept", null)).toBe("accept:e3b0c44298fc");
    const editKey = await decisionKey("edit", "new text");
    expect(editKey).toMatch(/^edit:[0-9a-f]{12}$/);
  });
});
