"""The command-line interface: staged runs, ranked output, error reporting."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from langpulse.cli import main
from langpulse.composite import RecommendationQuery, recommendation_to_doc
from langpulse.pipeline import PipelineConfig, run_pipeline

from test_pipeline import tree_digests

COMMANDS = ("clean", "profile", "compute-gh", "compute-so", "combine",
            "recommend", "export", "serve")


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def cli_out(fixture_input, tmp_path_factory):
    """One staged CLI run shared by the read-only command tests."""
    out = tmp_path_factory.mktemp("cli_out")
    runner = CliRunner()
    for args in (["clean", "-i", str(fixture_input), "-o", str(out)],
                 ["profile", "-o", str(out)],
                 ["compute-gh", "-o", str(out), "--top-k", "4"],
                 ["compute-so", "-o", str(out)],
                 ["combine", "-o", str(out)]):
        result = runner.invoke(main, args)
        assert result.exit_code == 0, result.output
    return out


class TestHelp:
    def test_lists_every_command(self, runner):
        result = runner.invoke(main, ["--help"])
        assert result.exit_code == 0
        for command in COMMANDS:
            assert command in result.output


class TestStages:
    def test_clean_reports_per_table_accounting(self, runner, fixture_input,
                                                tmp_path):
        result = runner.invoke(main, ["clean", "-i", str(fixture_input),
                                      "-o", str(tmp_path / "out")])
        assert result.exit_code == 0, result.output
        for table in ("projects", "commits", "posts", "answers"):
            assert f"{table}: read=" in result.output
        assert "emitted=" in result.output and "dropped=" in result.output

    def test_staged_cli_matches_run_pipeline_bytes(self, cli_out,
                                                   fixture_input, tmp_path):
        full = tmp_path / "full"
        run_pipeline(PipelineConfig(fixture_input, full, top_k=4))
        assert tree_digests(Path(cli_out)) == tree_digests(full)

    def test_clean_rejects_missing_input_dir(self, runner, tmp_path):
        result = runner.invoke(main, ["clean", "-i", str(tmp_path / "nope"),
                                      "-o", str(tmp_path / "out")])
        assert result.exit_code != 0

    def test_clean_names_missing_table(self, runner, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        result = runner.invoke(main, ["clean", "-i", str(empty),
                                      "-o", str(tmp_path / "out")])
        assert result.exit_code == 1
        assert "projects" in result.output

    def test_compute_so_requires_compute_gh(self, runner, fixture_input,
                                            tmp_path):
        out = tmp_path / "out"
        assert runner.invoke(main, ["clean", "-i", str(fixture_input),
                                    "-o", str(out)]).exit_code == 0
        result = runner.invoke(main, ["compute-so", "-o", str(out)])
        assert result.exit_code == 1
        assert "compute-gh" in result.output

    def test_profile_requires_clean(self, runner, tmp_path):
        result = runner.invoke(main, ["profile", "-o", str(tmp_path / "out")])
        assert result.exit_code == 1
        assert "clean" in result.output


class TestRecommend:
    def test_ranked_output_format(self, runner, cli_out):
        result = runner.invoke(main, ["recommend", "-o", str(cli_out),
                                      "--goal", "learn"])
        assert result.exit_code == 0, result.output
        lines = result.output.splitlines()
        assert lines[0] == "goal=learn horizon=short top_n=10"
        assert lines[1].startswith(" 1. ")
        assert len(lines) == 1 + 4  # four languages in the fixture

    def test_output_is_deterministic(self, runner, cli_out):
        args = ["recommend", "-o", str(cli_out), "--goal", "build",
                "--horizon", "medium"]
        first = runner.invoke(main, args)
        second = runner.invoke(main, args)
        assert first.exit_code == second.exit_code == 0
        assert first.output == second.output

    def test_json_out_matches_library(self, runner, cli_out, tmp_path,
                                      fixture_store):
        out_file = tmp_path / "rec.json"
        result = runner.invoke(main, ["recommend", "-o", str(cli_out),
                                      "--goal", "learn", "--horizon", "long",
                                      "--top-n", "5", "--category", "systems",
                                      "--out", str(out_file)])
        assert result.exit_code == 0, result.output
        got = json.loads(out_file.read_text(encoding="utf-8"))
        query = RecommendationQuery(
            goal="learn", horizon_years=5, top_n=5,
            category_filter=fixture_store.languages_in_category("systems"))
        assert got == recommendation_to_doc(fixture_store.recommend(query))

    def test_custom_profile_file(self, runner, cli_out, tmp_path):
        profile = tmp_path / "goals.ini"
        profile.write_text("[steady]\navailability = 1.0\n", encoding="utf-8")
        result = runner.invoke(main, ["recommend", "-o", str(cli_out),
                                      "--goal", "steady",
                                      "--profile-file", str(profile)])
        assert result.exit_code == 0, result.output
        assert "goal=steady" in result.output

    def test_unknown_goal_fails(self, runner, cli_out):
        result = runner.invoke(main, ["recommend", "-o", str(cli_out),
                                      "--goal", "conquer"])
        assert result.exit_code == 1
        assert "unknown goal" in result.output

    def test_unknown_category_fails(self, runner, cli_out):
        result = runner.invoke(main, ["recommend", "-o", str(cli_out),
                                      "--goal", "learn",
                                      "--category", "esoteric"])
        assert result.exit_code == 1
        assert "unknown category" in result.output

    def test_empty_store_fails_with_no_data(self, runner, tmp_path):
        result = runner.invoke(main, ["recommend", "-o", str(tmp_path),
                                      "--goal", "learn"])
        assert result.exit_code == 1
        assert "no data" in result.output


class TestExport:
    def test_prints_written_paths(self, runner, cli_out, tmp_path):
        dest = tmp_path / "exported"
        result = runner.invoke(main, ["export", "-o", str(cli_out),
                                      "--what", "all", "--format", "jsonl",
                                      "--dest", str(dest)])
        assert result.exit_code == 0, result.output
        printed = [Path(line) for line in result.output.splitlines()]
        assert sorted(p.name for p in printed) == [
            "composite_scores.jsonl", "gh_intermediate.jsonl",
            "profiles.jsonl", "so_intermediate.jsonl"]
        for path in printed:
            assert path.exists()

    def test_diff_mode(self, runner, cli_out, tmp_path):
        result = runner.invoke(main, ["export", "-o", str(cli_out),
                                      "--what", "composites",
                                      "--mode", "diff",
                                      "--dest", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert "composite_scores_diff.csv" in result.output


class TestServe:
    def test_rejects_malformed_bind(self, runner, cli_out):
        result = runner.invoke(main, ["serve", "-o", str(cli_out),
                                      "--bind", "localhost"])
        assert result.exit_code == 1
        assert "host:port" in result.output
