import type { RecommendationDoc, SeriesPoint } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

const PALETTE = [
  "#2563eb",
  "#dc2626",
  "#059669",
  "#d97706",
  "#7c3aed",
  "#0891b2",
  "#be185d",
  "#4d7c0f",
];

export function clearChildren(el: Element): void {
  while (el.firstChild) el.removeChild(el.firstChild);
}

export function renderPlaceholder(text: string): HTMLElement {
  const div = document.createElement("div");
  div.className = "placeholder";
  div.textContent = text;
  return div;
}

export function renderErrorBanner(message: string, onRetry: () => void): HTMLElement {
  const banner = document.createElement("div");
  banner.className = "error-banner";
  banner.setAttribute("role", "alert");
  const text = document.createElement("span");
  text.className = "error-message";
  text.textContent = message;
  const retry = document.createElement("button");
  retry.type = "button";
  retry.className = "retry";
  retry.textContent = "Retry";
  retry.addEventListener("click", onRetry);
  banner.append(text, retry);
  return banner;
}

/** The query a result card answers, echoed in its heading. */
export interface QueryEcho {
  goal: string;
  horizon: string;
  category: string | null;
  topN: number;
}

/** One ranked-list card. Displayed numbers are rounded for reading, but every
 * row and breakdown part carries the exact API value in data attributes so
 * nothing is lost between response and DOM. */
export function renderRankedTable(doc: RecommendationDoc, echo: QueryEcho): HTMLElement {
  const card = document.createElement("section");
  card.className = "result-card";

  const heading = document.createElement("h3");
  heading.textContent =
    `goal=${echo.goal} horizon=${echo.horizon} top_n=${echo.topN}` +
    (echo.category === null ? "" : ` category=${echo.category}`);
  card.append(heading);

  if (doc.ranked.length === 0) {
    card.append(renderPlaceholder("no data for this query"));
    return card;
  }

  const table = document.createElement("table");
  table.className = "ranked";
  const thead = document.createElement("thead");
  const headRow = document.createElement("tr");
  for (const label of ["Rank", "Language", "Score", ""]) {
    const th = document.createElement("th");
    th.textContent = label;
    headRow.append(th);
  }
  thead.append(headRow);
  const tbody = document.createElement("tbody");

  for (const entry of doc.ranked) {
    const row = document.createElement("tr");
    row.className = "ranked-row";
    row.dataset.rank = String(entry.rank);
    row.dataset.language = entry.language;
    row.dataset.score = String(entry.score);

    const rankCell = document.createElement("td");
    rankCell.className = "rank";
    rankCell.textContent = String(entry.rank);
    const langCell = document.createElement("td");
    langCell.className = "language";
    langCell.textContent = entry.language;
    const scoreCell = document.createElement("td");
    scoreCell.className = "score";
    scoreCell.textContent = entry.score.toFixed(4);
    const toggleCell = document.createElement("td");
    const toggle = document.createElement("button");
    toggle.type = "button";
    toggle.className = "toggle-breakdown";
    toggle.textContent = "details";
    toggleCell.append(toggle);
    row.append(rankCell, langCell, scoreCell, toggleCell);

    const detail = document.createElement("tr");
    detail.className = "breakdown-row";
    detail.dataset.language = entry.language;
    detail.hidden = true;
    const detailCell = document.createElement("td");
    detailCell.colSpan = 4;
    const list = document.createElement("dl");
    list.className = "breakdown";
    for (const [component, part] of Object.entries(entry.breakdown)) {
      const term = document.createElement("dt");
      term.textContent = component;
      const def = document.createElement("dd");
      def.className = "breakdown-part";
      def.dataset.component = component;
      def.dataset.weight = String(part.weight);
      def.dataset.value = String(part.value);
      def.dataset.contribution = String(part.contribution);
      def.textContent =
        `value ${part.value.toFixed(4)} x weight ${part.weight.toFixed(4)}` +
        ` = ${part.contribution.toFixed(4)}`;
      list.append(term, def);
    }
    detailCell.append(list);
    detail.append(detailCell);

    toggle.addEventListener("click", () => {
      detail.hidden = !detail.hidden;
    });
    tbody.append(row, detail);
  }

  table.append(thead, tbody);
  card.append(table);
  return card;
}

export interface ChartSeries {
  language: string;
  points: SeriesPoint[];
}

export interface ChartOptions {
  width?: number;
  height?: number;
  caption?: string;
}

function formatTick(value: number): string {
  return Number.isInteger(value) ? String(value) : value.toFixed(4);
}

/** Line chart: one line per language, year on the horizontal axis.
 *
 * A gap in a language's observed years breaks the line into separate runs
 * instead of bridging across missing years. Every point is a circle whose
 * data attributes hold the language, year, and exact API value.
 */
export function renderChart(series: readonly ChartSeries[], options: ChartOptions = {}): HTMLElement {
  const width = options.width ?? 640;
  const height = options.height ?? 320;
  const pad = 44;

  const all = series.flatMap((s) => s.points);
  if (all.length === 0) return renderPlaceholder("no data");

  const years = all.map((p) => p.year);
  const values = all.map((p) => p.value);
  const minYear = Math.min(...years);
  const maxYear = Math.max(...years);
  const minValue = Math.min(...values);
  const maxValue = Math.max(...values);
  const xSpan = maxYear - minYear || 1;
  const ySpan = maxValue - minValue || 1;
  const x = (year: number): number => pad + ((year - minYear) / xSpan) * (width - 2 * pad);
  const y = (value: number): number => height - pad - ((value - minValue) / ySpan) * (height - 2 * pad);

  const figure = document.createElement("figure");
  figure.className = "chart";
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));

  const axis = document.createElementNS(SVG_NS, "path");
  axis.setAttribute("class", "axis");
  axis.setAttribute(
    "d",
    `M ${pad} ${pad} L ${pad} ${height - pad} L ${width - pad} ${height - pad}`,
  );
  axis.setAttribute("fill", "none");
  axis.setAttribute("stroke", "#64748b");
  svg.append(axis);

  const ticks: Array<[string, number, number, string, number]> = [
    // label, x, y, anchor, exact value
    [String(minYear), pad, height - pad + 18, "middle", minYear],
    [String(maxYear), width - pad, height - pad + 18, "middle", maxYear],
    [formatTick(minValue), pad - 8, height - pad + 4, "end", minValue],
    [formatTick(maxValue), pad - 8, pad + 4, "end", maxValue],
  ];
  for (const [label, tx, ty, anchor, exact] of ticks) {
    const text = document.createElementNS(SVG_NS, "text");
    text.setAttribute("class", "tick");
    text.setAttribute("x", String(tx));
    text.setAttribute("y", String(ty));
    text.setAttribute("text-anchor", anchor);
    text.setAttribute("data-value", String(exact));
    text.setAttribute("fill", "#475569");
    text.setAttribute("font-size", "12");
    text.textContent = label;
    svg.append(text);
  }

  series.forEach((one, idx) => {
    const color = PALETTE[idx % PALETTE.length]!;
    const sorted = [...one.points].sort((a, b) => a.year - b.year);

    const runs: SeriesPoint[][] = [];
    for (const point of sorted) {
      const current = runs[runs.length - 1];
      const last = current?.[current.length - 1];
      if (current !== undefined && last !== undefined && point.year === last.year + 1) {
        current.push(point);
      } else {
        runs.push([point]);
      }
    }
    for (const run of runs) {
      if (run.length < 2) continue;
      const line = document.createElementNS(SVG_NS, "polyline");
      line.setAttribute("class", "chart-line");
      line.setAttribute("data-language", one.language);
      line.setAttribute("points", run.map((p) => `${x(p.year)},${y(p.value)}`).join(" "));
      line.setAttribute("fill", "none");
      line.setAttribute("stroke", color);
      line.setAttribute("stroke-width", "2");
      svg.append(line);
    }
    for (const point of sorted) {
      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("class", "point");
      circle.setAttribute("data-language", one.language);
      circle.setAttribute("data-year", String(point.year));
      circle.setAttribute("data-value", String(point.value));
      circle.setAttribute("cx", String(x(point.year)));
      circle.setAttribute("cy", String(y(point.value)));
      circle.setAttribute("r", "3.5");
      circle.setAttribute("fill", color);
      const title = document.createElementNS(SVG_NS, "title");
      title.textContent = `${one.language} ${point.year}: ${point.value}`;
      circle.append(title);
      svg.append(circle);
    }
  });

  figure.append(svg);

  const legend = document.createElement("figcaption");
  legend.className = "legend";
  if (options.caption !== undefined) {
    const caption = document.createElement("span");
    caption.className = "caption";
    caption.textContent = options.caption;
    legend.append(caption);
  }
  series.forEach((one, idx) => {
    const item = document.createElement("span");
    item.className = "legend-item";
    item.dataset.language = one.language;
    item.style.color = PALETTE[idx % PALETTE.length]!;
    item.textContent = one.points.length > 0 ? one.language : `${one.language} (no data)`;
    legend.append(item);
  });
  figure.append(legend);
  return figure;
}
