"""Composites, platform combination, demand shortage and the ranked recommender.

Every composite is the arithmetic mean of its normalized components, taken
over the components present at a cell; ratio components are computed on raw
counts and go missing where their denominator is zero. Combination blends the
two platforms as w * GH + (1 - w) * SO on cells where both exist.
"""

from __future__ import annotations

import configparser
import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from .core import LangYear
from .gh_metrics import GhIntermediate
from .so_metrics import SoIntermediate
from .transform import (HIGHER_BETTER, LOWER_BETTER, MetricSeries,
                        NormalizationParams, min_max_normalize, orient)

# Which normalized component series feed each composite. The response-time
# component is lower-is-better and gets oriented before entering the mean.
COMPOSITE_COMPONENTS: dict[str, tuple[str, ...]] = {
    "gh_popularity": ("gh_num_projects", "gh_num_users"),
    "gh_availability": ("gh_pull_requests_per_project", "gh_commits_per_project"),
    "gh_demand": ("gh_pending_issues_per_project",),
    "gh_community": ("gh_commits_per_project", "gh_projects_per_user",
                     "gh_commits_per_user"),
    "so_popularity": ("so_num_questions", "so_num_users"),
    "so_availability": ("so_answers_per_question",),
    "so_demand": ("so_unanswered_per_question",),
    "so_community": ("so_response_time_hours", "so_score_per_answer",
                     "so_answers_per_user", "so_questions_per_user"),
}

COMBINED_METRICS = ("popularity", "availability", "demand", "community")

COMPOSITE_FIELDS = (
    "gh_popularity", "gh_availability", "gh_demand", "gh_community",
    "so_popularity", "so_availability", "so_demand", "so_community",
    "popularity", "availability", "demand", "community",
    "demand_shortage",
)


@dataclass
class CompositeScores:
    key: LangYear
    gh_popularity: Optional[float] = None
    gh_availability: Optional[float] = None
    gh_demand: Optional[float] = None
    gh_community: Optional[float] = None
    so_popularity: Optional[float] = None
    so_availability: Optional[float] = None
    so_demand: Optional[float] = None
    so_community: Optional[float] = None
    popularity: Optional[float] = None
    availability: Optional[float] = None
    demand: Optional[float] = None
    community: Optional[float] = None
    demand_shortage: Optional[float] = None


def _ratio(numer: float, denom: float) -> Optional[float]:
    return numer / denom if denom > 0 else None


def gh_component_series(rows: Sequence[GhIntermediate]) -> dict[str, MetricSeries]:
    """Raw component series for the GitHub composites.

    num_repos in the popularity mean resolves to num_projects, the only
    repository count the intermediates define.
    """
    out = {name: MetricSeries(name) for name in (
        "gh_num_projects", "gh_num_users", "gh_pull_requests_per_project",
        "gh_commits_per_project", "gh_pending_issues_per_project",
        "gh_projects_per_user", "gh_commits_per_user")}
    for r in rows:
        k = r.key
        out["gh_num_projects"].cells[k] = float(r.num_projects)
        out["gh_num_users"].cells[k] = float(r.num_users)
        for name, numer, denom in (
            ("gh_pull_requests_per_project", r.num_pull_requests, r.num_projects),
            ("gh_commits_per_project", r.num_commits, r.num_projects),
            ("gh_pending_issues_per_project", r.num_pending_issues, r.num_projects),
            ("gh_projects_per_user", r.num_projects, r.num_users),
            ("gh_commits_per_user", r.num_commits, r.num_users),
        ):
            value = _ratio(float(numer), float(denom))
            if value is not None:
                out[name].cells[k] = value
    return out


def so_component_series(rows: Sequence[SoIntermediate]) -> dict[str, MetricSeries]:
    out = {name: MetricSeries(name) for name in (
        "so_num_questions", "so_num_users", "so_answers_per_question",
        "so_unanswered_per_question", "so_score_per_answer",
        "so_answers_per_user", "so_questions_per_user")}
    out["so_response_time_hours"] = MetricSeries(
        "so_response_time_hours", orientation=LOWER_BETTER)
    for r in rows:
        k = r.key
        out["so_num_questions"].cells[k] = float(r.num_questions)
        out["so_num_users"].cells[k] = float(r.num_users)
        for name, numer, denom in (
            ("so_answers_per_question", r.num_answers, r.num_questions),
            ("so_unanswered_per_question", r.num_unanswered_questions, r.num_questions),
            ("so_score_per_answer", r.total_score, r.num_answers),
            ("so_answers_per_user", r.num_answers, r.num_users),
            ("so_questions_per_user", r.num_questions, r.num_users),
        ):
            value = _ratio(float(numer), float(denom))
            if value is not None:
                out[name].cells[k] = value
        if r.avg_response_time_hours is not None:
            out["so_response_time_hours"].cells[k] = r.avg_response_time_hours
    return out


def normalize_components(
    components: Mapping[str, MetricSeries],
) -> tuple[dict[str, MetricSeries], list[NormalizationParams]]:
    """Min-max each component, then flip any lower-is-better series.

    Empty component series (e.g. response times with no side input) stay
    empty rather than erroring; their composites fall back to the remaining
    components.
    """
    normalized: dict[str, MetricSeries] = {}
    params: list[NormalizationParams] = []
    for name, series in components.items():
        if not series.cells:
            normalized[name] = series
            continue
        scaled, p = min_max_normalize(series)
        normalized[name] = orient(scaled)
        params.append(p)
    return normalized, params


def mean_of_present(values: Iterable[Optional[float]]) -> Optional[float]:
    present = [v for v in values if v is not None]
    if not present:
        return None
    return sum(present) / len(present)


def composite_of(name: str, components: Mapping[str, MetricSeries]) -> MetricSeries:
    """Present-component mean across the component series of one composite."""
    parts = [components[c] for c in COMPOSITE_COMPONENTS[name]]
    keys: set[LangYear] = set()
    for s in parts:
        keys.update(s.cells)
    cells = {}
    for key in keys:
        value = mean_of_present(s.cells.get(key) for s in parts)
        if value is not None:
            cells[key] = value
    return MetricSeries(name, cells, orientation=HIGHER_BETTER, scale="normalized")


def gh_composites(components: Mapping[str, MetricSeries]) -> dict[str, MetricSeries]:
    return {name: composite_of(name, components)
            for name in ("gh_popularity", "gh_availability", "gh_demand", "gh_community")}


def so_composites(components: Mapping[str, MetricSeries]) -> dict[str, MetricSeries]:
    return {name: composite_of(name, components)
            for name in ("so_popularity", "so_availability", "so_demand", "so_community")}


def combine(gh: MetricSeries, so: MetricSeries, w: float = 0.5,
            name: Optional[str] = None) -> MetricSeries:
    """Weighted platform blend; a cell exists only where both platforms have one."""
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"weight must be in [0, 1], got {w}")
    cells = {}
    for key, gh_value in gh.cells.items():
        so_value = so.cells.get(key)
        if so_value is not None:
            cells[key] = w * gh_value + (1.0 - w) * so_value
    return MetricSeries(name or gh.metric_name, cells,
                        orientation=HIGHER_BETTER, scale="normalized")


def demand_shortage(demand: MetricSeries, availability: MetricSeries) -> MetricSeries:
    """Cell-wise demand minus availability; high values mean unmet need."""
    cells = {}
    for key, d in demand.cells.items():
        a = availability.cells.get(key)
        if a is not None:
            cells[key] = d - a
    return MetricSeries("demand_shortage", cells, orientation=HIGHER_BETTER,
                        scale="normalized")


def build_composite_tables(
    gh_rows: Sequence[GhIntermediate],
    so_rows: Sequence[SoIntermediate],
    weight: float = 0.5,
) -> tuple[dict[str, MetricSeries], list[NormalizationParams]]:
    """All thirteen composite/combined series at level mode, plus the
    normalization parameters that produced them."""
    components = dict(gh_component_series(gh_rows))
    components.update(so_component_series(so_rows))
    normalized, params = normalize_components(components)
    series = gh_composites(normalized)
    series.update(so_composites(normalized))
    for metric in COMBINED_METRICS:
        series[metric] = combine(series[f"gh_{metric}"], series[f"so_{metric}"],
                                 weight, name=metric)
    series["demand_shortage"] = demand_shortage(series["demand"], series["availability"])
    return series, params


def assemble_composite_rows(series_by_field: Mapping[str, MetricSeries]) -> list[CompositeScores]:
    keys: set[LangYear] = set()
    for name in COMPOSITE_FIELDS:
        keys.update(series_by_field[name].cells)
    rows = []
    for key in sorted(keys):
        row = CompositeScores(key=key)
        for name in COMPOSITE_FIELDS:
            setattr(row, name, series_by_field[name].cells.get(key))
        rows.append(row)
    return rows


def rows_to_series(rows: Sequence[CompositeScores],
                   mode: str = "level") -> dict[str, MetricSeries]:
    out = {name: MetricSeries(name, mode=mode, scale="normalized")
           for name in COMPOSITE_FIELDS}
    for row in rows:
        for name in COMPOSITE_FIELDS:
            value = getattr(row, name)
            if value is not None:
                out[name].cells[row.key] = value
    return out


COMPOSITE_CSV_HEADER = ("language", "year") + COMPOSITE_FIELDS


def write_composite_scores(path: Union[str, Path], rows: Sequence[CompositeScores]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COMPOSITE_CSV_HEADER)
        for r in rows:
            writer.writerow([r.key.language, r.key.year] + [
                "" if getattr(r, name) is None else repr(getattr(r, name))
                for name in COMPOSITE_FIELDS])


def read_composite_scores(path: Union[str, Path]) -> list[CompositeScores]:
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for rec in csv.DictReader(fh):
            row = CompositeScores(key=LangYear(rec["language"], int(rec["year"])))
            for name in COMPOSITE_FIELDS:
                if rec[name] != "":
                    setattr(row, name, float(rec[name]))
            rows.append(row)
    return rows


# --- recommender -----------------------------------------------------------

HORIZON_YEARS = {"short": 1, "medium": 3, "long": 5}

# Default goal profiles; override with a profile file. Learning rewards unmet
# demand and a healthy community, building rewards contributor availability.
GOAL_PROFILES: dict[str, dict[str, float]] = {
    "learn": {"demand_shortage": 0.4, "community": 0.3, "popularity": 0.3},
    "build": {"availability": 0.4, "community": 0.4, "popularity": 0.2},
}


@dataclass
class RecommendationQuery:
    goal: str
    horizon_years: int = 1
    category_filter: Optional[set[str]] = None
    top_n: int = 10

    def __post_init__(self):
        if self.horizon_years < 1:
            raise ValueError("horizon_years must be >= 1")
        if self.top_n < 1:
            raise ValueError("top_n must be >= 1")


@dataclass
class ComponentContribution:
    weight: float
    value: float
    contribution: float


@dataclass
class RankedLanguage:
    language: str
    score: float
    breakdown: dict[str, ComponentContribution]


@dataclass
class Recommendation:
    status: str  # "ok" | "empty"
    ranked: list[RankedLanguage]
    goal: str
    horizon_years: int


def load_goal_profiles(path: Union[str, Path]) -> dict[str, dict[str, float]]:
    """Profile file: one section per goal, component = weight entries."""
    parser = configparser.ConfigParser()
    with open(path, "r", encoding="utf-8") as fh:
        parser.read_file(fh)
    profiles: dict[str, dict[str, float]] = {}
    for goal in parser.sections():
        weights = {}
        for component, raw in parser.items(goal):
            if component not in COMPOSITE_FIELDS:
                raise ValueError(f"unknown component {component!r} in goal {goal!r}")
            weights[component] = float(raw)
        _check_weights(goal, weights)
        profiles[goal] = weights
    if not profiles:
        raise ValueError(f"no goal sections in profile file {path}")
    return profiles


def _check_weights(goal: str, weights: dict[str, float]) -> None:
    if not weights:
        raise ValueError(f"goal {goal!r} has no component weights")
    if any(w <= 0 for w in weights.values()):
        raise ValueError(f"goal {goal!r} has non-positive weights")
    if abs(sum(weights.values()) - 1.0) > 1e-6:
        raise ValueError(f"goal {goal!r} weights must sum to 1")


def load_category_map(path: Union[str, Path]) -> dict[str, str]:
    """language=category pairs, # comments; languages lowercased."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected language=category")
        lang, cat = (part.strip().lower() for part in line.split("=", 1))
        out[lang] = cat
    return out


def recent_mean(values_by_year: Mapping[int, float], horizon_years: int) -> Optional[float]:
    """Mean over the most recent `horizon_years` observed years of one component."""
    if not values_by_year:
        return None
    years = sorted(values_by_year)[-horizon_years:]
    return sum(values_by_year[y] for y in years) / len(years)


def rank_recommendations(
    rows: Sequence[CompositeScores],
    query: RecommendationQuery,
    profiles: Optional[Mapping[str, Mapping[str, float]]] = None,
) -> Recommendation:
    """Score every language by its goal-weighted recent component averages.

    Components missing for a language drop out and the remaining weight mass
    renormalizes; languages with no present component at all are unscorable
    and left out. Ordering is deterministic: score descending, then language
    ascending.
    """
    profiles = profiles if profiles is not None else GOAL_PROFILES
    weights = profiles.get(query.goal)
    if weights is None:
        raise ValueError(f"unknown goal {query.goal!r}")
    _check_weights(query.goal, dict(weights))

    per_language: dict[str, dict[str, dict[int, float]]] = {}
    for row in rows:
        lang = row.key.language
        if query.category_filter is not None and lang not in query.category_filter:
            continue
        for component in weights:
            value = getattr(row, component)
            if value is not None:
                per_language.setdefault(lang, {}).setdefault(
                    component, {})[row.key.year] = value

    scored: list[RankedLanguage] = []
    for lang, by_component in per_language.items():
        breakdown: dict[str, ComponentContribution] = {}
        present_mass = 0.0
        weighted_sum = 0.0
        for component, w in weights.items():
            avg = recent_mean(by_component.get(component, {}), query.horizon_years)
            if avg is None:
                continue
            present_mass += w
            weighted_sum += w * avg
            breakdown[component] = ComponentContribution(weight=w, value=avg,
                                                         contribution=0.0)
        if present_mass == 0.0:
            continue
        score = weighted_sum / present_mass
        for component, part in breakdown.items():
            part.contribution = part.weight * part.value / present_mass
        scored.append(RankedLanguage(lang, score, breakdown))

    scored.sort(key=lambda r: (-r.score, r.language))
    ranked = scored[:query.top_n]
    return Recommendation(
        status="ok" if ranked else "empty",
        ranked=ranked,
        goal=query.goal,
        horizon_years=query.horizon_years,
    )


def recommendation_to_doc(rec: Recommendation) -> dict:
    """Machine-readable ranking; the CLI JSON output and the API response
    both come from this, which is what makes them comparable byte-for-byte."""
    return {
        "status": rec.status,
        "goal": rec.goal,
        "horizon_years": rec.horizon_years,
        "ranked": [
            {
                "rank": i,
                "language": r.language,
                "score": r.score,
                "breakdown": {
                    component: {"weight": p.weight, "value": p.value,
                                "contribution": p.contribution}
                    for component, p in sorted(r.breakdown.items())
                },
            }
            for i, r in enumerate(rec.ranked, 1)
        ],
    }
