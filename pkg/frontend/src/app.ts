import { ApiClient, ApiError } from "./api.js";
import {
  GOALS,
  HORIZONS,
  LatestWins,
  METRICS,
  MODES,
  SOURCES,
  effectiveSource,
  formErrors,
  type ChartSelection,
  type QueryFormState,
} from "./state.js";
import {
  clearChildren,
  renderChart,
  renderErrorBanner,
  renderPlaceholder,
  renderRankedTable,
  type ChartSeries,
} from "./render.js";
import type { LanguagesDoc } from "./types.js";

/** Wires the query form, the result history, and the trend chart to the API.
 *
 * All writes to the DOM go through a per-concern last-response-wins gate, so
 * overlapping requests (rapid resubmits, chart control changes) can resolve
 * in any order without a stale response overwriting a fresh one.
 */
export class DashboardApp {
  private readonly root: HTMLElement;
  private readonly api: ApiClient;
  private readonly latest = new LatestWins();
  private settled: Promise<void> = Promise.resolve();

  private languages: string[] = [];

  private statusEl!: HTMLElement;
  private form!: HTMLFormElement;
  private categoryControl!: HTMLElement;
  private categorySelect!: HTMLSelectElement;
  private formErrorsEl!: HTMLUListElement;
  private queryBanner!: HTMLElement;
  private resultsEl!: HTMLElement;
  private languageBoxes!: HTMLElement;
  private sourceSelect!: HTMLSelectElement;
  private chartBanner!: HTMLElement;
  private chartEl!: HTMLElement;

  constructor(root: HTMLElement, api: ApiClient) {
    this.root = root;
    this.api = api;
    this.buildSkeleton();
  }

  /** Load languages, categories, and store health; safe to call again. */
  init(): Promise<void> {
    return this.track(
      Promise.all([this.loadLanguages(), this.loadHealth()]).then(() => undefined),
    );
  }

  /** Resolves once every action started so far (and any it queued) is done. */
  whenSettled(): Promise<void> {
    const snapshot = this.settled;
    return snapshot.then(() => (this.settled === snapshot ? undefined : this.whenSettled()));
  }

  /** Validate the form; on success POST the query and prepend a result card.
   * An invalid form never reaches the network. */
  submitQuery(): Promise<void> {
    const state = this.readFormState();
    const errors = formErrors(state);
    this.showFormErrors(errors);
    if (errors.length > 0) return Promise.resolve();
    return this.latest.run(
      "recommend",
      () =>
        this.api.recommend({
          goal: state.goal,
          horizon: state.horizon,
          category: state.category,
          top_n: state.topN,
        }),
      (doc) => {
        clearChildren(this.queryBanner);
        this.resultsEl.prepend(renderRankedTable(doc, state));
      },
      (err) => {
        clearChildren(this.queryBanner);
        this.queryBanner.append(
          renderErrorBanner(describeError(err), () => {
            void this.track(this.submitQuery());
          }),
        );
      },
    );
  }

  /** Fetch the selected languages' series and redraw the chart. */
  refreshChart(): Promise<void> {
    const selection = this.readChartSelection();
    if (selection.languages.length === 0) {
      clearChildren(this.chartBanner);
      this.setChart(renderPlaceholder("select at least one language"));
      return Promise.resolve();
    }
    return this.latest.run(
      "chart",
      () =>
        Promise.all(
          selection.languages.map((language) =>
            this.api.metrics({
              language,
              metric: selection.metric,
              source: selection.source,
              mode: selection.mode,
            }),
          ),
        ),
      (docs) => {
        clearChildren(this.chartBanner);
        const series: ChartSeries[] = docs.map((doc) => ({
          language: doc.language,
          points: doc.series,
        }));
        this.setChart(
          renderChart(series, {
            caption: `${selection.metric} (${selection.source}, ${selection.mode})`,
          }),
        );
      },
      (err) => {
        clearChildren(this.chartBanner);
        this.chartBanner.append(
          renderErrorBanner(describeError(err), () => {
            void this.track(this.refreshChart());
          }),
        );
      },
    );
  }

  private track(action: Promise<void>): Promise<void> {
    const settled = action.catch(() => undefined);
    this.settled = this.settled.then(() => settled);
    return settled;
  }

  private loadLanguages(): Promise<void> {
    return this.latest.run(
      "languages",
      () => this.api.languages(),
      (doc) => {
        clearChildren(this.queryBanner);
        this.applyLanguages(doc);
      },
      (err) => {
        clearChildren(this.queryBanner);
        this.queryBanner.append(
          renderErrorBanner(describeError(err), () => {
            void this.track(this.loadLanguages());
          }),
        );
      },
    );
  }

  private loadHealth(): Promise<void> {
    return this.latest.run(
      "health",
      () => this.api.health(),
      (doc) => {
        this.statusEl.dataset.provenance = doc.provenance_sha256;
        this.statusEl.textContent =
          `store ok: ${doc.languages} languages, ${doc.rows.composites} composite rows,` +
          ` provenance ${doc.provenance_sha256.slice(0, 12)}`;
      },
      () => {
        this.statusEl.textContent = "API unreachable";
      },
    );
  }

  private applyLanguages(doc: LanguagesDoc): void {
    this.languages = [...doc.languages];

    clearChildren(this.languageBoxes);
    for (const language of this.languages) {
      const label = document.createElement("label");
      label.className = "language-box";
      const box = document.createElement("input");
      box.type = "checkbox";
      box.name = "chart-language";
      box.value = language;
      box.addEventListener("change", () => {
        void this.track(this.refreshChart());
      });
      label.append(box, document.createTextNode(` ${language}`));
      this.languageBoxes.append(label);
    }

    if (doc.categories === null) {
      // no category map in the store: the control would only mislead
      this.categoryControl.hidden = true;
    } else {
      this.categoryControl.hidden = false;
      const names = [...new Set(Object.values(doc.categories))].sort();
      clearChildren(this.categorySelect);
      const all = document.createElement("option");
      all.value = "";
      all.textContent = "all";
      this.categorySelect.append(all);
      for (const name of names) {
        const option = document.createElement("option");
        option.value = name;
        option.textContent = name;
        this.categorySelect.append(option);
      }
    }
  }

  private readFormState(): QueryFormState {
    const goal = this.select("goal").value;
    const horizon = this.select("horizon").value;
    const rawCategory = this.categoryControl.hidden ? "" : this.categorySelect.value;
    const topInput = this.form.elements.namedItem("top_n") as HTMLInputElement;
    const raw = topInput.value.trim();
    return {
      goal,
      horizon,
      category: rawCategory === "" ? null : rawCategory,
      topN: raw === "" ? Number.NaN : Number(raw),
    };
  }

  private readChartSelection(): ChartSelection {
    const checked = new Set<string>();
    for (const input of this.languageBoxes.querySelectorAll<HTMLInputElement>(
      'input[name="chart-language"]',
    )) {
      if (input.checked) checked.add(input.value);
    }
    const metric = this.select("chart-metric").value;
    const source = effectiveSource(metric, this.select("chart-source").value);
    return {
      // rank order, so line colors stay stable as boxes toggle
      languages: this.languages.filter((language) => checked.has(language)),
      metric,
      source,
      mode: this.select("chart-mode").value,
    };
  }

  /** demand_shortage exists only for the combined blend; pin the control. */
  private normalizeChartControls(): void {
    const metric = this.select("chart-metric").value;
    if (metric === "demand_shortage") {
      this.sourceSelect.value = "combined";
      this.sourceSelect.disabled = true;
    } else {
      this.sourceSelect.disabled = false;
    }
  }

  private showFormErrors(errors: string[]): void {
    clearChildren(this.formErrorsEl);
    this.formErrorsEl.hidden = errors.length === 0;
    for (const message of errors) {
      const item = document.createElement("li");
      item.textContent = message;
      this.formErrorsEl.append(item);
    }
  }

  private setChart(node: HTMLElement): void {
    clearChildren(this.chartEl);
    this.chartEl.append(node);
  }

  private select(name: string): HTMLSelectElement {
    const el = this.root.querySelector(`select[name="${name}"]`);
    if (!(el instanceof HTMLSelectElement)) throw new Error(`missing select ${name}`);
    return el;
  }

  private buildSkeleton(): void {
    clearChildren(this.root);

    const header = document.createElement("header");
    const title = document.createElement("h1");
    title.textContent = "langpulse";
    this.statusEl = document.createElement("p");
    this.statusEl.className = "status";
    this.statusEl.textContent = "connecting…";
    header.append(title, this.statusEl);

    const querySection = document.createElement("section");
    querySection.className = "query-section";
    const queryTitle = document.createElement("h2");
    queryTitle.textContent = "Recommendations";

    this.form = document.createElement("form");
    this.form.className = "query-form";
    this.form.append(
      labeled("goal", makeSelect("goal", GOALS)),
      labeled("horizon", makeSelect("horizon", HORIZONS)),
    );
    this.categorySelect = makeSelect("category", []);
    this.categoryControl = labeled("category", this.categorySelect);
    this.categoryControl.classList.add("category-control");
    this.categoryControl.hidden = true;
    this.form.append(this.categoryControl);
    const topInput = document.createElement("input");
    topInput.type = "number";
    topInput.name = "top_n";
    topInput.min = "1";
    topInput.step = "1";
    topInput.value = "10";
    this.form.append(labeled("top_n", topInput));
    const submit = document.createElement("button");
    submit.type = "submit";
    submit.textContent = "Recommend";
    this.form.append(submit);
    this.form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.track(this.submitQuery());
    });

    this.formErrorsEl = document.createElement("ul");
    this.formErrorsEl.className = "form-errors";
    this.formErrorsEl.hidden = true;
    this.queryBanner = document.createElement("div");
    this.queryBanner.className = "banner-slot query-banner";
    this.resultsEl = document.createElement("div");
    this.resultsEl.className = "results";
    querySection.append(queryTitle, this.form, this.formErrorsEl, this.queryBanner, this.resultsEl);

    const chartSection = document.createElement("section");
    chartSection.className = "chart-section";
    const chartTitle = document.createElement("h2");
    chartTitle.textContent = "Trends";
    const controls = document.createElement("fieldset");
    controls.className = "chart-controls";
    this.languageBoxes = document.createElement("div");
    this.languageBoxes.className = "language-boxes";
    controls.append(this.languageBoxes);
    const metricSelect = makeSelect("chart-metric", METRICS);
    this.sourceSelect = makeSelect("chart-source", SOURCES);
    this.sourceSelect.value = "combined";
    const modeSelect = makeSelect("chart-mode", MODES);
    controls.append(
      labeled("metric", metricSelect),
      labeled("source", this.sourceSelect),
      labeled("mode", modeSelect),
    );
    for (const select of [metricSelect, this.sourceSelect, modeSelect]) {
      select.addEventListener("change", () => {
        this.normalizeChartControls();
        void this.track(this.refreshChart());
      });
    }
    this.chartBanner = document.createElement("div");
    this.chartBanner.className = "banner-slot chart-banner";
    this.chartEl = document.createElement("div");
    this.chartEl.className = "chart-area";
    this.chartEl.append(renderPlaceholder("select at least one language"));
    chartSection.append(chartTitle, controls, this.chartBanner, this.chartEl);

    this.root.append(header, querySection, chartSection);
  }
}

function labeled(text: string, control: HTMLElement): HTMLLabelElement {
  const label = document.createElement("label");
  const span = document.createElement("span");
  span.textContent = text;
  label.append(span, control);
  return label;
}

function makeSelect(name: string, options: readonly string[]): HTMLSelectElement {
  const select = document.createElement("select");
  select.name = name;
  for (const value of options) {
    const option = document.createElement("option");
    option.value = value;
    option.textContent = value;
    select.append(option);
  }
  return select;
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    return err.status === 0 ? `API unreachable: ${err.message}` : `API error ${err.status}: ${err.message}`;
  }
  return err instanceof Error ? err.message : String(err);
}
