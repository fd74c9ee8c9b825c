/**
 * Shared round-id scheme: date prefix plus a counter, zero-padded to three
 * digits.  Both players derive the same id for round n of a given day
 * without talking to each other, which is what lets their useBox calls land
 * on the same transaction.
 */

export function datePrefix(date: Date): string {
  const y = date.getFullYear().toString().padStart(4, "0");
  const m = (date.getMonth() + 1).toString().padStart(2, "0");
  const d = date.getDate().toString().padStart(2, "0");
  return `${y}${m}${d}`;
}

export function roundId(date: Date, counter: number): string {
  if (!Number.isInteger(counter) || counter < 1) {
    throw new Error(`round counter must be a positive integer, got ${counter}`);
  }
  return datePrefix(date) + counter.toString().padStart(3, "0");
}
