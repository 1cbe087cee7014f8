import type { SeriesPoint } from "./types.js";

/** Year-on-year changes of a level series, used by the test suite as an
 * independent cross-check of the server's differenced series.
 *
 * Matches the server's contract: only strictly consecutive observed years
 * produce a value, so a gap in the input stays a gap instead of bridging
 * across the missing years, and each run's first year is stripped.
 */
export function consecutiveDifferences(points: readonly SeriesPoint[]): SeriesPoint[] {
  const sorted = [...points].sort((a, b) => a.year - b.year);
  const out: SeriesPoint[] = [];
  for (let i = 1; i < sorted.length; i++) {
    const prev = sorted[i - 1]!;
    const current = sorted[i]!;
    if (current.year === prev.year + 1) {
      out.push({ year: current.year, value: current.value - prev.value });
    }
  }
  return out;
}
