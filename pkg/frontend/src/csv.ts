/** Minimal CSV reader for the report endpoint's output (RFC-4180 quoting,
 *  comma separator, LF line ends). */

import type { HistogramRow } from "./types.js";

export function parseCsv(text: string): string[][] {
  const rows: string[][] = [];
  let row: string[] = [];
  let cell = "";
  let inQuotes = false;
  let i = 0;
  while (i < text.length) {
    const ch = text[i] as string;
    if (inQuotes) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          cell += '"';
          i += 2;
          continue;
        }
        inQuotes = false;
        i += 1;
        continue;
      }
      cell += ch;
      i += 1;
      continue;
    }
    if (ch === '"') {
      inQuotes = true;
    } else if (ch === ",") {
      row.push(cell);
      cell = "";
    } else if (ch === "\n") {
      row.push(cell);
      rows.push(row);
      row = [];
      cell = "";
    } else if (ch !== "\r") {
      cell += ch;
    }
    i += 1;
  }
  if (cell !== "" || row.length > 0) {
    row.push(cell);
    rows.push(row);
  }
  return rows;
}

/** Histogram CSV layout: lang,cat1..cat6,unclassified,total. Counts are taken
 *  verbatim from the document -- the UI never recomputes totals. */
export function parseHistogramCsv(text: string): HistogramRow[] {
  const rows = parseCsv(text);
  if (rows.length === 0) return [];
  const header = rows[0] as string[];
  const out: HistogramRow[] = [];
  for (const cells of rows.slice(1)) {
    if (cells.length !== header.length) continue;
    const buckets: Record<string, number> = {};
    for (let col = 1; col < header.length - 1; col += 1) {
      buckets[header[col] as string] = Number(cells[col]);
    }
    out.push({
      lang: cells[0] as string,
      buckets,
      total: Number(cells[header.length - 1]),
    });
  }
  return out;
}
