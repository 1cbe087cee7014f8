"""Shared fixtures: the checked-in input fixture, golden files, and one
session-wide pipeline run most tests read from.

A terminal-summary hook prints one PASS/FAIL line per acceptance criterion so
the verdicts stay visible even with output capture on.
"""

from __future__ import annotations

import json
import re
import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).resolve().parent
REPO_ROOT = TESTS_DIR.parent
FIXTURE_INPUT = TESTS_DIR / "fixtures" / "input"
GOLDEN_DIR = TESTS_DIR / "golden"

# Parameters the golden files were generated with (scripts/make_golden.py).
FIXTURE_TOP_K = 4
FIXTURE_WEIGHT = 0.5

sys.path.insert(0, str(TESTS_DIR))  # makes `import oracle` / `import datagen` work


def load_golden(name: str):
    return json.loads((GOLDEN_DIR / f"{name}.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def fixture_input() -> Path:
    return FIXTURE_INPUT


@pytest.fixture(scope="session")
def golden():
    return load_golden


@pytest.fixture(scope="session")
def fixture_cfg(tmp_path_factory):
    from langpulse.pipeline import PipelineConfig

    return PipelineConfig(
        input_dir=FIXTURE_INPUT,
        output_dir=tmp_path_factory.mktemp("pipeline-run"),
        top_k=FIXTURE_TOP_K,
        weight_w=FIXTURE_WEIGHT,
    )


@pytest.fixture(scope="session")
def fixture_store(fixture_cfg):
    from langpulse.pipeline import run_pipeline

    return run_pipeline(fixture_cfg)


# --- acceptance verdict reporting ------------------------------------------

_CRITERION_PATTERN = re.compile(r"test_criterion_(\d+)")
_verdicts: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    match = _CRITERION_PATTERN.search(report.nodeid)
    if not match or "test_acceptance" not in report.nodeid:
        return
    num = int(match.group(1))
    if report.when == "call":
        verdict = ("SKIP" if report.skipped
                   else "PASS" if report.passed else "FAIL")
        _verdicts[num] = (verdict, report.nodeid)
    elif report.when == "setup" and report.skipped:
        _verdicts[num] = ("SKIP", report.nodeid)
    elif report.when == "setup" and report.failed:
        _verdicts[num] = ("FAIL", report.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_verdicts):
        verdict, _ = _verdicts[num]
        terminalreporter.write_line(f"ACCEPTANCE CRITERION {num}: {verdict}")
