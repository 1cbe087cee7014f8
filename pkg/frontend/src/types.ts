/** Response document shapes of the langpulse HTTP API. */

export interface SeriesPoint {
  year: number;
  value: number;
}

/** GET /api/metrics?language=&metric=&source=&mode= */
export interface MetricsDoc {
  language: string;
  metric: string;
  source: string;
  mode: string;
  series: SeriesPoint[];
}

/** GET /api/languages */
export interface LanguagesDoc {
  /** Languages in rank order (most projects first). */
  languages: string[];
  /** language -> category, or null when the store has no category map. */
  categories: Record<string, string> | null;
}

export interface ColumnProfileDoc {
  column_name: string;
  data_kind: string;
  null_count: number;
  distinct_count: number;
  exactness: string;
  min_value: number | null;
  max_value: number | null;
}

/** GET /api/profile/{table} */
export interface TableProfileDoc {
  table_name: string;
  row_count: number;
  columns: ColumnProfileDoc[];
}

export interface BreakdownPart {
  weight: number;
  value: number;
  contribution: number;
}

export interface RankedEntry {
  rank: number;
  language: string;
  score: number;
  /** Component name -> contribution; serialized in sorted component order. */
  breakdown: Record<string, BreakdownPart>;
}

/** POST /api/recommend response (identical to the CLI's --out JSON). */
export interface RecommendationDoc {
  status: string;
  goal: string;
  horizon_years: number;
  ranked: RankedEntry[];
}

/** POST /api/recommend request body. */
export interface RecommendRequest {
  goal: string;
  horizon: string;
  category?: string | null;
  top_n: number;
}

/** GET /api/health */
export interface HealthDoc {
  status: string;
  provenance_sha256: string;
  rows: { gh: number; so: number; composites: number };
  languages: number;
}
