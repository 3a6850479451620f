/** Shapes mirrored from the review API; the UI never derives its own numbers. */

export interface TranscriptView {
  model: string;
  response: string;
  extracted: string | null;
  raw_span: string;
}

export interface QueueEntry {
  qid: number;
  lang: string;
  state: string;
  round: number;
  source_en: string;
  current_text: string;
  candidate_text: string | null;
  transcripts: TranscriptView[];
  proposed_category: number | null;
}

export type DecisionAction = "accept" | "edit" | "reject";

export interface HistogramRow {
  lang: string;
  /** bucket label ("cat1".."cat6", "unclassified") -> count, as reported */
  buckets: Record<string, number>;
  total: number;
}
