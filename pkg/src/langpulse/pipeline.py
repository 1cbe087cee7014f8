"""Staged pipeline runs, the on-disk artifact layout, and the metric store.

Each stage reads only artifacts written by earlier stages, so the CLI can run
them one at a time or `run_pipeline` can run them all; both paths produce
byte-identical output directories for identical inputs. Nothing written here
embeds timestamps or absolute paths — determinism is the point.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from .composite import (COMBINED_METRICS, COMPOSITE_CSV_HEADER, COMPOSITE_FIELDS,
                        CompositeScores, Recommendation, RecommendationQuery,
                        assemble_composite_rows, build_composite_tables,
                        load_category_map, rank_recommendations,
                        read_composite_scores, rows_to_series,
                        write_composite_scores)
from .core import PartialCounts
from .gh_metrics import (GH_CSV_HEADER, JoinReport, assemble_gh_intermediate,
                         build_project_index, count_commits, count_new_projects,
                         count_new_users, count_pending_issues,
                         count_pull_requests, read_gh_intermediate,
                         write_gh_intermediate)
from .ingest import (DEFAULT_YEAR_RANGE, GH_TABLE_NAMES, TABLES, CleanRecord,
                     LanguageAliasMap, describe_table, read_clean_table)
from .profiler import (APPROXIMATE, EXACT, TableProfile, profile_table,
                       profiles_from_json, profiles_to_json,
                       render_profiles_text)
from .so_metrics import (SO_CSV_HEADER, PostFilterReport, assemble_so_intermediate,
                         avg_response_time, count_answers, count_new_so_users,
                         count_questions, count_unanswered, load_answer_links,
                         prepare_questions, read_so_intermediate, sum_scores,
                         write_so_intermediate)
from .transform import (DIFFERENCED, LEVEL, MetricSeries, NormalizationParams,
                        first_difference, read_normalization_params,
                        top_k_languages, write_normalization_params)

# Artifact names inside the output directory.
CLEANED_DIR = "cleaned"
DROP_REPORT = "drop_report.json"
PROFILES_JSON = "profiles.json"
PROFILES_TXT = "profiles.txt"
GH_INTERMEDIATE = "gh_intermediate.csv"
SO_INTERMEDIATE = "so_intermediate.csv"
TOP_LANGUAGES = "top_languages.csv"
COMPOSITE_SCORES = "composite_scores.csv"
COMPOSITE_SCORES_DIFF = "composite_scores_diff.csv"
NORMALIZATION_PARAMS = "normalization_params.csv"
GH_JOIN_REPORT = "gh_join_report.json"
SO_FILTER_REPORT = "so_filter_report.json"
PROVENANCE = "provenance.json"
CATEGORIES_FILE = "categories.txt"

# Tables that must exist in the input directory; answers and categories are
# optional extras (response times and the category filter degrade gracefully).
REQUIRED_TABLES = GH_TABLE_NAMES + ("posts",)


@dataclass
class PipelineConfig:
    # input_dir may stay None for stages that only read earlier artifacts.
    input_dir: Optional[Union[str, Path]]
    output_dir: Union[str, Path]
    top_k: int = 50
    weight_w: float = 0.5
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE
    mode: str = LEVEL
    alias_file: Optional[Union[str, Path]] = None
    profile_file: Optional[Union[str, Path]] = None  # goal->weights overrides
    exactness: str = EXACT

    def __post_init__(self):
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if not 0.0 <= self.weight_w <= 1.0:
            raise ValueError("weight_w must be in [0, 1]")
        if self.mode not in (LEVEL, DIFFERENCED):
            raise ValueError(f"mode must be level or differenced, got {self.mode!r}")
        if self.exactness not in (EXACT, APPROXIMATE):
            raise ValueError(f"unknown exactness {self.exactness!r}")
        if self.input_dir is not None:
            self.input_dir = Path(self.input_dir)
        self.output_dir = Path(self.output_dir)

    def aliases(self) -> LanguageAliasMap:
        if self.alias_file is not None:
            return LanguageAliasMap.load(self.alias_file)
        return LanguageAliasMap.default()

    def aliases_digest(self) -> str:
        if self.alias_file is not None:
            return _sha256_bytes(Path(self.alias_file).read_bytes())
        ref = resources.files("langpulse").joinpath("data/aliases.txt")
        return _sha256_bytes(ref.read_bytes())


def _sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _sha256_file(path: Union[str, Path]) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def discover_inputs(input_dir: Union[str, Path]) -> dict[str, list[Path]]:
    """Input files per table, resolved by each table's file pattern.

    Raises FileNotFoundError naming the first required table with no files.
    """
    input_dir = Path(input_dir)
    found: dict[str, list[Path]] = {}
    for name, descriptor in TABLES.items():
        paths = sorted(input_dir.glob(descriptor.source_pattern))
        if paths:
            found[name] = paths
    for name in REQUIRED_TABLES:
        if name not in found:
            raise FileNotFoundError(
                f"missing required input table {name!r} "
                f"(no files match {TABLES[name].source_pattern!r} in {input_dir})")
    return found


def _serialize_clean_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, datetime):
        return value.isoformat()
    return str(value)


def write_clean_table(path: Union[str, Path], table_name: str,
                      records: Iterable[CleanRecord]) -> None:
    descriptor = describe_table(table_name)
    year_idx = (descriptor.index(descriptor.year_column)
                if descriptor.year_column else None)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(descriptor.column_names)
        for rec in records:
            row = [_serialize_clean_value(v) for v in rec.values]
            if year_idx is not None:
                if rec.created_at is not None:
                    # Keep the full timestamp, not just the derived year: the
                    # response-time metric needs it after a cleaned round-trip.
                    row[year_idx] = rec.created_at.isoformat()
                elif rec.year is not None and not row[year_idx]:
                    # Timestamp-kind year column fed a bare year: the typed
                    # value is absent but the year itself survives the trip.
                    row[year_idx] = str(rec.year)
            writer.writerow(row)


def load_cleaned(cfg: PipelineConfig, table_name: str,
                 missing_ok: bool = False) -> list[CleanRecord]:
    """Read one table back from output_dir/cleaned. Cleaning is idempotent,
    so the same clean path re-reads our own artifact losslessly."""
    path = Path(cfg.output_dir) / CLEANED_DIR / f"{table_name}.csv"
    if not path.exists():
        if missing_ok:
            return []
        raise FileNotFoundError(
            f"{path} not found — run the clean stage first")
    records, _ = read_clean_table(describe_table(table_name), [path],
                                  cfg.aliases(), cfg.year_range)
    return records


def _update_provenance(cfg: PipelineConfig, stage: str, settings: dict,
                       inputs: Optional[dict[str, str]] = None) -> None:
    """Record the settings one stage actually ran with, plus input digests.

    No paths or timestamps land here: provenance must hash identically across
    working copies, and its digest must change whenever any input byte does.
    """
    path = Path(cfg.output_dir) / PROVENANCE
    obj = json.loads(path.read_text(encoding="utf-8")) if path.exists() else {}
    if inputs is not None:
        obj["inputs"] = inputs
    obj["aliases_sha256"] = cfg.aliases_digest()
    obj.setdefault("config", {})[stage] = settings
    _write_json(path, obj)


def stage_clean(cfg: PipelineConfig) -> dict[str, dict]:
    """Stream, clean and persist every input table; returns per-table stats."""
    if cfg.input_dir is None:
        raise ValueError("input_dir is required for the clean stage")
    out = Path(cfg.output_dir)
    (out / CLEANED_DIR).mkdir(parents=True, exist_ok=True)
    found = discover_inputs(cfg.input_dir)
    aliases = cfg.aliases()
    stats_by_table: dict[str, dict] = {}
    digests: dict[str, str] = {}
    for name, paths in found.items():
        records, stats = read_clean_table(TABLES[name], paths, aliases,
                                          cfg.year_range)
        write_clean_table(out / CLEANED_DIR / f"{name}.csv", name, records)
        stats_by_table[name] = stats.as_dict()
        for p in paths:
            digests[p.name] = _sha256_file(p)
    categories_src = Path(cfg.input_dir) / CATEGORIES_FILE
    if categories_src.exists():
        load_category_map(categories_src)  # validate before copying
        (out / CATEGORIES_FILE).write_bytes(categories_src.read_bytes())
        digests[CATEGORIES_FILE] = _sha256_file(categories_src)
    totals: dict[str, int] = {}
    for stats in stats_by_table.values():
        for key, value in stats.items():
            totals[key] = totals.get(key, 0) + value
    _write_json(out / DROP_REPORT, {"tables": stats_by_table, "totals": totals})
    _update_provenance(cfg, "clean", {"year_range": list(cfg.year_range)},
                       inputs=digests)
    return stats_by_table


def stage_profile(cfg: PipelineConfig) -> list[TableProfile]:
    """Profile every cleaned table; writes the JSON and aligned-text reports."""
    out = Path(cfg.output_dir)
    profiles: list[TableProfile] = []
    for name in TABLES:
        path = out / CLEANED_DIR / f"{name}.csv"
        if not path.exists():
            if name in REQUIRED_TABLES:
                raise FileNotFoundError(f"{path} not found — run the clean stage first")
            continue
        records = load_cleaned(cfg, name)
        profiles.append(profile_table(TABLES[name], records, mode=cfg.exactness))
    (out / PROFILES_JSON).write_text(profiles_to_json(profiles), encoding="utf-8")
    (out / PROFILES_TXT).write_text(render_profiles_text(profiles), encoding="utf-8")
    _update_provenance(cfg, "profile", {"exactness": cfg.exactness})
    return profiles


def stage_compute_gh(cfg: PipelineConfig):
    """GitHub intermediates for the top-K languages by total project count."""
    out = Path(cfg.output_dir)
    projects = load_cleaned(cfg, "projects")
    commits = load_cleaned(cfg, "commits")
    pull_requests = load_cleaned(cfg, "pull_requests")
    pr_history = load_cleaned(cfg, "pull_request_history")
    issues = load_cleaned(cfg, "issues")
    issue_events = load_cleaned(cfg, "issue_events")

    report = JoinReport()
    index = build_project_index(projects, report)
    num_projects = count_new_projects(projects)
    num_users = count_new_users(projects, commits, index, report)
    num_commits = count_commits(commits, index, report)
    num_prs = count_pull_requests(pull_requests, pr_history, index, report)
    num_pending = count_pending_issues(issues, issue_events, index, report)

    top = top_k_languages(num_projects, cfg.top_k)
    rows = assemble_gh_intermediate(num_users, num_projects, num_commits,
                                    num_prs, num_pending, languages=top)
    write_gh_intermediate(out / GH_INTERMEDIATE, rows)
    write_top_languages(out / TOP_LANGUAGES, top, num_projects)
    _write_json(out / GH_JOIN_REPORT, report.as_dict())
    _update_provenance(cfg, "compute_gh", {"top_k": cfg.top_k})
    return rows, top, report


def write_top_languages(path: Union[str, Path], top: Sequence[str],
                        num_projects: PartialCounts) -> None:
    totals: dict[str, int] = {}
    for key, n in num_projects.items():
        totals[key.language] = totals.get(key.language, 0) + n
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("language", "total_projects"))
        for lang in top:  # rank order, not alphabetical
            writer.writerow((lang, totals.get(lang, 0)))


def read_top_languages(path: Union[str, Path]) -> list[tuple[str, int]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return [(rec["language"], int(rec["total_projects"]))
                for rec in csv.DictReader(fh)]


def stage_compute_so(cfg: PipelineConfig):
    """StackOverflow intermediates, restricted to the GitHub top-K languages."""
    out = Path(cfg.output_dir)
    top_path = out / TOP_LANGUAGES
    if not top_path.exists():
        raise FileNotFoundError(f"{top_path} not found — run compute-gh first")
    allowed = {lang for lang, _ in read_top_languages(top_path)}
    posts = load_cleaned(cfg, "posts")
    answer_records = load_cleaned(cfg, "answers", missing_ok=True)

    report = PostFilterReport()
    questions = list(prepare_questions(posts, cfg.aliases(), allowed, report))
    answers = load_answer_links(answer_records)
    rows = assemble_so_intermediate(
        count_new_so_users(questions),
        count_questions(questions),
        count_answers(questions),
        sum_scores(questions),
        count_unanswered(questions),
        avg_response_time(questions, answers),
    )
    write_so_intermediate(out / SO_INTERMEDIATE, rows)
    _write_json(out / SO_FILTER_REPORT, report.as_dict())
    return rows, report


def stage_combine(cfg: PipelineConfig):
    """Normalize, compose and blend both platforms; writes the score tables."""
    out = Path(cfg.output_dir)
    gh_rows = read_gh_intermediate(out / GH_INTERMEDIATE)
    so_rows = read_so_intermediate(out / SO_INTERMEDIATE)
    series, params = build_composite_tables(gh_rows, so_rows, cfg.weight_w)
    level_rows = assemble_composite_rows(series)
    diff_series = {name: first_difference(series[name]) for name in COMPOSITE_FIELDS}
    diff_rows = assemble_composite_rows(diff_series)
    write_composite_scores(out / COMPOSITE_SCORES, level_rows)
    write_composite_scores(out / COMPOSITE_SCORES_DIFF, diff_rows)
    write_normalization_params(out / NORMALIZATION_PARAMS, params)
    _update_provenance(cfg, "combine", {"weight_w": cfg.weight_w, "mode": cfg.mode})
    return level_rows, diff_rows, params


def run_pipeline(cfg: PipelineConfig) -> "MetricStore":
    """All stages in canonical order; returns the store loaded back from disk
    (so what callers see is exactly what the artifacts say)."""
    Path(cfg.output_dir).mkdir(parents=True, exist_ok=True)
    stage_clean(cfg)
    stage_profile(cfg)
    stage_compute_gh(cfg)
    stage_compute_so(cfg)
    stage_combine(cfg)
    return MetricStore.load(cfg.output_dir)


@dataclass
class MetricStore:
    """Immutable snapshot of one pipeline run's artifacts."""

    output_dir: Path
    profiles: dict[str, TableProfile] = field(default_factory=dict)
    gh: list = field(default_factory=list)
    so: list = field(default_factory=list)
    composites: list[CompositeScores] = field(default_factory=list)
    composites_diff: list[CompositeScores] = field(default_factory=list)
    params: list[NormalizationParams] = field(default_factory=list)
    top_languages: list[tuple[str, int]] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    provenance_digest: Optional[str] = None
    categories: Optional[dict[str, str]] = None

    @classmethod
    def load(cls, output_dir: Union[str, Path]) -> "MetricStore":
        out = Path(output_dir)
        store = cls(output_dir=out)
        path = out / PROFILES_JSON
        if path.exists():
            store.profiles = {
                tp.table_name: tp
                for tp in profiles_from_json(path.read_text(encoding="utf-8"))
            }
        if (out / GH_INTERMEDIATE).exists():
            store.gh = read_gh_intermediate(out / GH_INTERMEDIATE)
        if (out / SO_INTERMEDIATE).exists():
            store.so = read_so_intermediate(out / SO_INTERMEDIATE)
        if (out / COMPOSITE_SCORES).exists():
            store.composites = read_composite_scores(out / COMPOSITE_SCORES)
        if (out / COMPOSITE_SCORES_DIFF).exists():
            store.composites_diff = read_composite_scores(out / COMPOSITE_SCORES_DIFF)
        if (out / NORMALIZATION_PARAMS).exists():
            store.params = read_normalization_params(out / NORMALIZATION_PARAMS)
        if (out / TOP_LANGUAGES).exists():
            store.top_languages = read_top_languages(out / TOP_LANGUAGES)
        if (out / PROVENANCE).exists():
            raw = (out / PROVENANCE).read_bytes()
            store.provenance = json.loads(raw)
            store.provenance_digest = _sha256_bytes(raw)
        if (out / CATEGORIES_FILE).exists():
            store.categories = load_category_map(out / CATEGORIES_FILE)
        return store

    @property
    def languages(self) -> list[str]:
        """Top-K languages in rank order."""
        return [lang for lang, _ in self.top_languages]

    def series(self, metric: str, source: str = "combined",
               mode: str = LEVEL) -> MetricSeries:
        """One metric series by name, platform and mode.

        metric: popularity | availability | demand | community | demand_shortage
        source: gh | so | combined (demand_shortage is combined-only)
        """
        if mode == "diff":
            mode = DIFFERENCED
        if mode not in (LEVEL, DIFFERENCED):
            raise ValueError(f"unknown mode {mode!r}")
        if source not in ("gh", "so", "combined"):
            raise ValueError(f"unknown source {source!r}")
        if metric == "demand_shortage":
            if source != "combined":
                raise ValueError("demand_shortage exists only for source=combined")
            field_name = metric
        elif metric in COMBINED_METRICS:
            field_name = metric if source == "combined" else f"{source}_{metric}"
        else:
            raise ValueError(f"unknown metric {metric!r}")
        rows = self.composites if mode == LEVEL else self.composites_diff
        return rows_to_series(rows, mode=mode)[field_name]

    def recommend(self, query: RecommendationQuery,
                  profiles: Optional[Mapping[str, Mapping[str, float]]] = None,
                  ) -> Recommendation:
        return rank_recommendations(self.composites, query, profiles)

    def languages_in_category(self, category: str) -> set[str]:
        if self.categories is None:
            raise ValueError("no category map loaded for this store")
        members = {lang for lang, cat in self.categories.items() if cat == category}
        if not members:
            known = sorted(set(self.categories.values()))
            raise ValueError(f"unknown category {category!r}; known: {known}")
        return members


# --- export ----------------------------------------------------------------

EXPORT_TARGETS = ("profiles", "gh", "so", "composites", "all")

PROFILE_EXPORT_HEADER = ("table", "row_count", "column", "data_kind", "min_value",
                         "max_value", "distinct_count", "exactness", "null_count")


def _real6(value: float) -> str:
    """Reals render with up to 6 significant decimals in exports."""
    return format(value, ".6g")


def _profile_export_rows(store: MetricStore) -> list[dict]:
    rows = []
    for name in TABLES:  # canonical table order
        tp = store.profiles.get(name)
        if tp is None:
            continue
        for cp in tp.columns:
            rows.append({
                "table": tp.table_name,
                "row_count": tp.row_count,
                "column": cp.column_name,
                "data_kind": cp.data_kind,
                "min_value": cp.min_value,
                "max_value": cp.max_value,
                "distinct_count": cp.distinct_count,
                "exactness": cp.exactness,
                "null_count": cp.null_count,
            })
    return rows


def _gh_export_rows(store: MetricStore) -> list[dict]:
    return [dict(zip(GH_CSV_HEADER,
                     (r.key.language, r.key.year, r.num_users, r.num_projects,
                      r.num_commits, r.num_pull_requests, r.num_pending_issues)))
            for r in store.gh]


def _so_export_rows(store: MetricStore) -> list[dict]:
    return [dict(zip(SO_CSV_HEADER,
                     (r.key.language, r.key.year, r.num_users, r.num_questions,
                      r.num_answers, r.total_score, r.num_unanswered_questions,
                      r.avg_response_time_hours)))
            for r in store.so]


def _composite_export_rows(rows: Sequence[CompositeScores]) -> list[dict]:
    out = []
    for r in rows:
        doc = {"language": r.key.language, "year": r.key.year}
        for name in COMPOSITE_FIELDS:
            doc[name] = getattr(r, name)
        out.append(doc)
    return out


def _write_export(path: Path, header: Sequence[str], rows: list[dict],
                  fmt: str) -> None:
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([
                    "" if row[col] is None
                    else _real6(row[col]) if isinstance(row[col], float)
                    else row[col]
                    for col in header])
    else:  # jsonl
        with open(path, "w", encoding="utf-8", newline="") as fh:
            for row in rows:
                doc = {col: (float(_real6(v)) if isinstance(v, float) else v)
                       for col in header for v in (row[col],)}
                fh.write(json.dumps(doc) + "\n")


def export(store: MetricStore, what: str = "all", fmt: str = "csv",
           dest: Optional[Union[str, Path]] = None,
           mode: str = LEVEL) -> list[Path]:
    """Write store tables for external tools; fixed column order and sorting.

    Integers stay bare; reals are cut to 6 significant decimals; missing
    values export as an empty CSV field / JSON null. `mode` picks the level
    or differenced composite table.
    """
    if what not in EXPORT_TARGETS:
        raise ValueError(f"unknown export target {what!r}")
    if fmt not in ("csv", "jsonl"):
        raise ValueError(f"unknown export format {fmt!r}")
    if mode == "diff":
        mode = DIFFERENCED
    if mode not in (LEVEL, DIFFERENCED):
        raise ValueError(f"unknown mode {mode!r}")
    dest = Path(dest) if dest is not None else Path(store.output_dir) / "export"
    dest.mkdir(parents=True, exist_ok=True)
    ext = "csv" if fmt == "csv" else "jsonl"
    written: list[Path] = []

    def emit(stem: str, header: Sequence[str], rows: list[dict]) -> None:
        path = dest / f"{stem}.{ext}"
        _write_export(path, header, rows, fmt)
        written.append(path)

    if what in ("profiles", "all"):
        emit("profiles", PROFILE_EXPORT_HEADER, _profile_export_rows(store))
    if what in ("gh", "all"):
        emit("gh_intermediate", GH_CSV_HEADER, _gh_export_rows(store))
    if what in ("so", "all"):
        emit("so_intermediate", SO_CSV_HEADER, _so_export_rows(store))
    if what in ("composites", "all"):
        if mode == LEVEL:
            emit("composite_scores", COMPOSITE_CSV_HEADER,
                 _composite_export_rows(store.composites))
        else:
            emit("composite_scores_diff", COMPOSITE_CSV_HEADER,
                 _composite_export_rows(store.composites_diff))
    return written
