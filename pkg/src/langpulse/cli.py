"""Command-line entry points for the pipeline stages, recommender and server."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

import click

from .composite import (GOAL_PROFILES, HORIZON_YEARS, RecommendationQuery,
                        load_goal_profiles, recommendation_to_doc)
from .pipeline import (MetricStore, PipelineConfig, export, stage_clean,
                       stage_combine, stage_compute_gh, stage_compute_so,
                       stage_profile)
from .profiler import APPROXIMATE, EXACT

_out_dir = click.option("--output-dir", "-o", required=True,
                        type=click.Path(file_okay=False), help="Artifact directory.")


def _config(output_dir: str, **kwargs) -> PipelineConfig:
    Path(output_dir).mkdir(parents=True, exist_ok=True)
    return PipelineConfig(input_dir=kwargs.pop("input_dir", None),
                          output_dir=output_dir, **kwargs)


def _fail(message: str):
    raise click.ClickException(message)


@click.group()
def main():
    """Per-language community metrics from GitHub and StackOverflow dumps."""


@main.command()
@click.option("--input-dir", "-i", required=True,
              type=click.Path(exists=True, file_okay=False),
              help="Directory holding the raw dump tables.")
@_out_dir
def clean(input_dir: str, output_dir: str):
    """Parse and clean the raw tables; write cleaned CSVs and a drop report."""
    cfg = _config(output_dir, input_dir=input_dir)
    try:
        stats = stage_clean(cfg)
    except (FileNotFoundError, ValueError) as e:
        _fail(str(e))
    for name, s in stats.items():
        click.echo(f"{name}: read={s['rows_read']} emitted={s['rows_emitted']} "
                   f"dropped={s['rows_read'] - s['rows_emitted']}")


@main.command()
@_out_dir
@click.option("--exactness", type=click.Choice([EXACT, APPROXIMATE]),
              default=EXACT, show_default=True,
              help="Distinct counts: exact sets or a cardinality sketch.")
def profile(output_dir: str, exactness: str):
    """Profile every cleaned table (min/max/distinct/nulls per column)."""
    cfg = _config(output_dir, exactness=exactness)
    try:
        profiles = stage_profile(cfg)
    except (FileNotFoundError, ValueError) as e:
        _fail(str(e))
    click.echo(f"profiled {len(profiles)} tables -> {output_dir}/profiles.json")


@main.command("compute-gh")
@_out_dir
@click.option("--top-k", type=int, default=50, show_default=True,
              help="Keep the K languages with the most projects.")
def compute_gh(output_dir: str, top_k: int):
    """Compute GitHub per-language-per-year intermediates for the top-K languages."""
    try:
        cfg = _config(output_dir, top_k=top_k)
        rows, top, _ = stage_compute_gh(cfg)
    except (FileNotFoundError, ValueError) as e:
        _fail(str(e))
    click.echo(f"{len(rows)} rows over {len(top)} languages -> "
               f"{output_dir}/gh_intermediate.csv")


@main.command("compute-so")
@_out_dir
def compute_so(output_dir: str):
    """Compute StackOverflow intermediates for the already-selected languages."""
    try:
        cfg = _config(output_dir)
        rows, _ = stage_compute_so(cfg)
    except (FileNotFoundError, ValueError) as e:
        _fail(str(e))
    click.echo(f"{len(rows)} rows -> {output_dir}/so_intermediate.csv")


@main.command()
@_out_dir
@click.option("--weight", type=float, default=0.5, show_default=True,
              help="GitHub share w in the blend w*GH + (1-w)*SO.")
def combine(output_dir: str, weight: float):
    """Normalize, compose and blend both platforms into the score tables."""
    try:
        cfg = _config(output_dir, weight_w=weight)
        level_rows, diff_rows, _ = stage_combine(cfg)
    except (FileNotFoundError, ValueError) as e:
        _fail(str(e))
    click.echo(f"{len(level_rows)} level rows, {len(diff_rows)} diff rows -> "
               f"{output_dir}/composite_scores.csv")


def _load_store(output_dir: str) -> MetricStore:
    return MetricStore.load(output_dir)


@main.command()
@_out_dir
@click.option("--goal", required=True, help="Scoring profile, e.g. learn or build.")
@click.option("--horizon", type=click.Choice(sorted(HORIZON_YEARS)),
              default="short", show_default=True,
              help="How many recent years to average (short=1, medium=3, long=5).")
@click.option("--top-n", type=int, default=10, show_default=True)
@click.option("--category", default=None,
              help="Restrict to one category from the store's category map.")
@click.option("--profile-file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Goal->component weight overrides (INI).")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Also write the ranking as JSON.")
def recommend(output_dir: str, goal: str, horizon: str, top_n: int,
              category: Optional[str], profile_file: Optional[str],
              out: Optional[str]):
    """Print a ranked list of languages for a goal over a recent horizon."""
    store = _load_store(output_dir)
    if not store.composites:
        _fail("no data: composite scores missing — run the pipeline first")
    profiles = GOAL_PROFILES
    if profile_file is not None:
        try:
            profiles = load_goal_profiles(profile_file)
        except ValueError as e:
            _fail(str(e))
    category_filter = None
    if category is not None:
        try:
            category_filter = store.languages_in_category(category)
        except ValueError as e:
            _fail(str(e))
    try:
        query = RecommendationQuery(goal=goal, horizon_years=HORIZON_YEARS[horizon],
                                    category_filter=category_filter, top_n=top_n)
        rec = store.recommend(query, profiles)
    except ValueError as e:
        _fail(str(e))
    doc = recommendation_to_doc(rec)
    if out is not None:
        Path(out).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                             encoding="utf-8")
    if rec.status == "empty":
        _fail("no data: no language has a scored component for this query")
    click.echo(f"goal={rec.goal} horizon={horizon} top_n={top_n}")
    for entry in doc["ranked"]:
        parts = " ".join(f"{name}={part['value']:.4f}"
                         for name, part in entry["breakdown"].items())
        click.echo(f"{entry['rank']:>2}. {entry['language']:<16} "
                   f"{entry['score']:.4f}  {parts}")


@main.command("export")
@_out_dir
@click.option("--what", type=click.Choice(["profiles", "gh", "so", "composites", "all"]),
              default="all", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "jsonl"]),
              default="csv", show_default=True)
@click.option("--mode", type=click.Choice(["level", "diff"]),
              default="level", show_default=True,
              help="Which composite table to export.")
@click.option("--dest", type=click.Path(file_okay=False), default=None,
              help="Destination directory [default: OUTPUT_DIR/export].")
def export_cmd(output_dir: str, what: str, fmt: str, mode: str,
               dest: Optional[str]):
    """Write store tables for external tools (6-significant-digit reals)."""
    store = _load_store(output_dir)
    try:
        written = export(store, what=what, fmt=fmt, dest=dest, mode=mode)
    except (OSError, ValueError) as e:
        _fail(str(e))
    for path in written:
        click.echo(str(path))


@main.command()
@_out_dir
@click.option("--bind", default="127.0.0.1:8000", show_default=True,
              help="host:port to listen on.")
@click.option("--profile-file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Goal->component weight overrides (INI).")
def serve(output_dir: str, bind: str, profile_file: Optional[str]):
    """Serve the HTTP API over the computed metric store."""
    import uvicorn

    from .server import create_app

    store = _load_store(output_dir)
    profiles = None
    if profile_file is not None:
        try:
            profiles = load_goal_profiles(profile_file)
        except ValueError as e:
            _fail(str(e))
    host, sep, port_text = bind.rpartition(":")
    if not sep or not port_text.isdigit():
        _fail(f"--bind expects host:port, got {bind!r}")
    app = create_app(store, goal_profiles=profiles)
    uvicorn.run(app, host=host, port=int(port_text), log_level="warning")


if __name__ == "__main__":
    main()
