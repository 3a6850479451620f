import { describe, expect, it } from "vitest";

import { parseCsv, parseHistogramCsv } from "../src/csv.js";

describe("parseCsv", () => {
  it("parses quoted and numeric cells", () => {
    const rows = parseCsv('"lang","cat1","total"\n"de",2,3\n');
    expect(rows).toEqual([
      ["lang", "cat1", "total"],
      ["de", "2", "3"],
    ]);
  });

  it("handles escaped quotes and CRLF", () => {
    const rows = parseCsv('"a ""b""",1\r\n"c",2\r\n');
    expect(rows).toEqual([
      ['a "b"', "1"],
      ["c", "2"],
    ]);
  });

  it("returns no rows for empty input", () => {
    expect(parseCsv("")).toEqual([]);
  });
});

describe("parseHistogramCsv", () => {
  const doc =
    '"lang","cat1","cat2","cat3","cat4","cat5","cat6","unclassified","total"\n' +
    '"bn",0,1,0,0,0,0,0,1\n' +
    '"fr",2,0,0,1,0,0,1,4\n';

  it("keeps counts verbatim from the document", () => {
    const rows = parseHistogramCsv(doc);
    expect(rows).toHaveLength(2);
    expect(rows[0]).toEqual({
      lang: "bn",
      buckets: { cat1: 0, cat2: 1, cat3: 0, cat4: 0, cat5: 0, cat6: 0, unclassified: 0 },
      total: 1,
    });
    expect(rows[1]?.buckets.unclassified).toBe(1);
    expect(rows[1]?.total).toBe(4);
  });

  it("header-only document yields no rows", () => {
    expect(parseHistogramCsv(doc.split("\n")[0] + "\n")).toEqual([]);
  });
});
