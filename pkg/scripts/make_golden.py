#!/usr/bin/env python3
"""Regenerate tests/golden/*.json from the brute-force reference.

The golden files are what the end-to-end tests compare pipeline output
against. They come from tests/oracle.py, never from the package itself, so a
bug in the package cannot silently bless itself into the expectations.

Usage: python3 scripts/make_golden.py
"""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import oracle  # noqa: E402

# Pipeline parameters the golden run is pinned to; the tests use the same.
TOP_K = 4
WEIGHT = 0.5

FIXTURE_INPUT = ROOT / "tests" / "fixtures" / "input"
ALIASES = ROOT / "src" / "langpulse" / "data" / "aliases.txt"
GOLDEN_DIR = ROOT / "tests" / "golden"


def main() -> None:
    results = oracle.run(FIXTURE_INPUT, ALIASES, top_k_n=TOP_K, weight=WEIGHT)
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    for name, payload in results.items():
        path = GOLDEN_DIR / f"{name}.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
        print(f"wrote {path.relative_to(ROOT)}")


if __name__ == "__main__":
    main()
