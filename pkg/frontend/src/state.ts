/** Form state, validation, and request sequencing for the dashboard. */

export const GOALS = ["learn", "build"] as const;
export const HORIZONS = ["short", "medium", "long"] as const;
export const METRICS = [
  "popularity",
  "availability",
  "demand",
  "community",
  "demand_shortage",
] as const;
export const SOURCES = ["gh", "so", "combined"] as const;
export const MODES = ["level", "diff"] as const;

/** The recommendation query form as read from the controls. */
export interface QueryFormState {
  goal: string;
  horizon: string;
  /** null means "all categories" (no filter sent). */
  category: string | null;
  topN: number;
}

/** Mirrors the server-side query validation; a state with errors must never
 * be submitted. */
export function formErrors(state: QueryFormState): string[] {
  const errors: string[] = [];
  if (!(GOALS as readonly string[]).includes(state.goal)) {
    errors.push(`goal must be one of: ${GOALS.join(", ")}`);
  }
  if (!(HORIZONS as readonly string[]).includes(state.horizon)) {
    errors.push(`horizon must be one of: ${HORIZONS.join(", ")}`);
  }
  if (!Number.isInteger(state.topN) || state.topN < 1) {
    errors.push("top_n must be a whole number of at least 1");
  }
  return errors;
}

/** What the trend chart should show. */
export interface ChartSelection {
  /** Languages to plot, in ranking order. Empty means "show placeholder". */
  languages: string[];
  metric: string;
  source: string;
  mode: string;
}

/** demand_shortage only exists for the combined platform blend. */
export function effectiveSource(metric: string, source: string): string {
  return metric === "demand_shortage" ? "combined" : source;
}

type Apply<T> = (value: T) => void;
type OnError = (err: unknown) => void;

/** Per-key last-response-wins sequencing for overlapping requests.
 *
 * Each key tracks a monotonically increasing ticket; a response (or failure)
 * is only delivered if no newer request on the same key has started since.
 * Stale responses and stale failures are dropped silently, which is what
 * keeps an out-of-order slow response from overwriting a fresh one.
 */
export class LatestWins {
  private readonly tickets = new Map<string, number>();

  async run<T>(key: string, work: () => Promise<T>, apply: Apply<T>, onError?: OnError): Promise<void> {
    const ticket = (this.tickets.get(key) ?? 0) + 1;
    this.tickets.set(key, ticket);
    try {
      const value = await work();
      if (this.tickets.get(key) === ticket) apply(value);
    } catch (err) {
      if (this.tickets.get(key) !== ticket) return;
      if (onError) onError(err);
      else throw err;
    }
  }
}
