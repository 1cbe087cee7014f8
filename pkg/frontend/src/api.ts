import type {
  HealthDoc,
  LanguagesDoc,
  MetricsDoc,
  RecommendRequest,
  RecommendationDoc,
  TableProfileDoc,
} from "./types.js";

/** Minimal fetch signature so tests (and the API-down path) can inject one. */
export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** An API call that did not produce a usable document. Status 0 means the
 * request never reached the server (network failure, server down). */
export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, message: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
  }
}

export interface MetricsQuery {
  language: string;
  metric: string;
  source: string;
  mode: string;
}

/** Typed client for the langpulse HTTP API; the only backend contact point. */
export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  languages(): Promise<LanguagesDoc> {
    return this.request("/api/languages");
  }

  health(): Promise<HealthDoc> {
    return this.request("/api/health");
  }

  profile(table: string): Promise<TableProfileDoc> {
    return this.request(`/api/profile/${encodeURIComponent(table)}`);
  }

  metrics(query: MetricsQuery): Promise<MetricsDoc> {
    const params = new URLSearchParams({
      language: query.language,
      metric: query.metric,
      source: query.source,
      mode: query.mode,
    });
    return this.request(`/api/metrics?${params.toString()}`);
  }

  recommend(body: RecommendRequest): Promise<RecommendationDoc> {
    return this.request("/api/recommend", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.base + path, init);
    } catch (err) {
      const reason = err instanceof Error ? err.message : String(err);
      throw new ApiError(0, `cannot reach API: ${reason}`);
    }
    if (!response.ok) {
      throw new ApiError(response.status, await describeFailure(response));
    }
    return (await response.json()) as T;
  }
}

/** Error responses carry {"detail": "..."}; fall back to the status line. */
async function describeFailure(response: Response): Promise<string> {
  try {
    const body: unknown = await response.json();
    if (body !== null && typeof body === "object" && "detail" in body) {
      const detail = (body as { detail: unknown }).detail;
      if (typeof detail === "string") return detail;
    }
  } catch {
    // not a JSON body; the status line below is all we have
  }
  return `${response.status} ${response.statusText}`.trim();
}
