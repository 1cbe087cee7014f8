"""Series-level transforms: top-K filtering, differencing, min-max scaling.

A MetricSeries is a sparse mapping over (language, year) cells; missing cells
stay missing through every transform here, because absent activity in a dump
slice is not the same thing as an observed zero.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Union

from .core import LangYear, PartialCounts

HIGHER_BETTER = "higher_better"
LOWER_BETTER = "lower_better"
LEVEL = "level"
DIFFERENCED = "differenced"
RAW = "raw"
NORMALIZED = "normalized"


@dataclass
class MetricSeries:
    metric_name: str
    cells: dict[LangYear, float] = field(default_factory=dict)
    orientation: str = HIGHER_BETTER
    mode: str = LEVEL
    scale: str = RAW

    def by_language(self) -> dict[str, dict[int, float]]:
        out: dict[str, dict[int, float]] = {}
        for key, value in self.cells.items():
            out.setdefault(key.language, {})[key.year] = value
        return out


@dataclass
class NormalizationParams:
    metric_name: str
    observed_min: float
    observed_max: float


def series_from_counts(name: str, counts: PartialCounts | Mapping[LangYear, float],
                       orientation: str = HIGHER_BETTER) -> MetricSeries:
    items = counts.items()
    return MetricSeries(name, {k: float(v) for k, v in items}, orientation=orientation)


def top_k_languages(project_counts: PartialCounts, k: int) -> list[str]:
    """Languages ranked by total project count over all years.

    Ties break lexicographically ascending; returns at most k languages.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    totals: dict[str, int] = {}
    for key, n in project_counts.items():
        totals[key.language] = totals.get(key.language, 0) + n
    ranked = sorted(totals, key=lambda lang: (-totals[lang], lang))
    return ranked[:k]


def first_difference(series: MetricSeries) -> MetricSeries:
    """Year-on-year change per language; strips each language's first year.

    Only strictly consecutive observed years produce a cell, so gaps propagate
    as gaps instead of bridging across missing years.
    """
    if series.mode != LEVEL:
        raise ValueError(f"can only difference a level series, got {series.mode}")
    cells: dict[LangYear, float] = {}
    for language, by_year in series.by_language().items():
        for year, value in by_year.items():
            prev = by_year.get(year - 1)
            if prev is not None:
                cells[LangYear(language, year)] = value - prev
    return replace(series, cells=cells, mode=DIFFERENCED)


def min_max_normalize(series: MetricSeries) -> tuple[MetricSeries, NormalizationParams]:
    """Rescale all cells of the series to [0, 1] by the pooled min and max.

    The pool spans every language and year of the one metric, keeping all
    languages on a shared axis. A degenerate (constant) series maps to 0.5
    everywhere: it carries no ranking information, and the midpoint avoids
    biasing downstream composites.
    """
    if series.scale != RAW:
        raise ValueError("series is already normalized")
    if not series.cells:
        raise ValueError(f"cannot normalize empty series {series.metric_name!r}")
    lo = min(series.cells.values())
    hi = max(series.cells.values())
    if hi == lo:
        cells = {key: 0.5 for key in series.cells}
    else:
        span = hi - lo
        cells = {key: (value - lo) / span for key, value in series.cells.items()}
    params = NormalizationParams(series.metric_name, lo, hi)
    return replace(series, cells=cells, scale=NORMALIZED), params


def orient(series: MetricSeries) -> MetricSeries:
    """Flip lower-is-better series to higher-is-better via v -> 1 - v."""
    if series.scale != NORMALIZED:
        raise ValueError("orientation flip requires a normalized series")
    if series.orientation == HIGHER_BETTER:
        return series
    cells = {key: 1.0 - value for key, value in series.cells.items()}
    return replace(series, cells=cells, orientation=HIGHER_BETTER)


PARAMS_CSV_HEADER = ("metric", "observed_min", "observed_max")


def write_normalization_params(path: Union[str, Path],
                               params: Iterable[NormalizationParams]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PARAMS_CSV_HEADER)
        for p in sorted(params, key=lambda p: p.metric_name):
            writer.writerow([p.metric_name, repr(p.observed_min), repr(p.observed_max)])


def read_normalization_params(path: Union[str, Path]) -> list[NormalizationParams]:
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for rec in csv.DictReader(fh):
            out.append(NormalizationParams(rec["metric"], float(rec["observed_min"]),
                                           float(rec["observed_max"])))
    return out
