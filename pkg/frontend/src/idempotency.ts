/** Client-side idempotency key, mirroring the server's decision fingerprint:
 *  `action:first-12-hex-chars-of-sha256(new_text or "")`. */

import type { DecisionAction } from "./types.js";

export async function sha256Hex(text: string): Promise<string> {
  const data = new TextEncoder().encode(text);
  const digest = await crypto.subtle.digest("SHA-256", data);
  return Array.from(new Uint8Array(digest))
    .map((b) => b.toString(16).padStart(2, "0"))
    .join("");
}

export async function decisionKey(
  action: DecisionAction,
  newText: string | null,
): Promise<string> {
  const hash = await sha256Hex(newText ?? "");
  return `${action}:${hash.slice(0, 12)}`;
}
