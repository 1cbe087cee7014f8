"""Helpers shared by the oracle-comparison tests.

They clean the same raw CSV text twice — once through the package, once
through the brute-force oracle — and compute each side's metrics so tests can
compare them key for key.
"""

from __future__ import annotations

import io
from pathlib import Path

import oracle
from langpulse.gh_metrics import (
    build_project_index,
    count_commits,
    count_new_projects,
    count_new_users,
    count_pending_issues,
    count_pull_requests,
)
from langpulse.ingest import (
    IngestStats,
    LanguageAliasMap,
    clean_stream,
    describe_table,
    stream_records,
)
from langpulse.so_metrics import (
    avg_response_time,
    count_answers,
    count_new_so_users,
    count_questions,
    count_unanswered,
    load_answer_links,
    prepare_questions,
    sum_scores,
)

ALIAS_PATH = (Path(__file__).resolve().parents[1]
              / "src" / "langpulse" / "data" / "aliases.txt")


def package_clean(texts: dict[str, str]):
    aliases = LanguageAliasMap.default()
    tables, stats = {}, {}
    for table, text in texts.items():
        descriptor = describe_table(table)
        s = IngestStats()
        raw = stream_records(descriptor, io.StringIO(text), stats=s)
        tables[table] = list(clean_stream(descriptor, raw, aliases, stats=s))
        stats[table] = s
    return tables, stats, aliases


def oracle_clean(texts: dict[str, str]):
    aliases = oracle.load_aliases(ALIAS_PATH)
    tables, stats = {}, {}
    for table, text in texts.items():
        rows, s = oracle.clean_table(text, table, aliases)
        tables[table] = rows
        stats[table] = s
    return tables, stats, aliases


def as_plain(counts) -> dict:
    """PartialCounts -> {(language, year): n}, keys as plain tuples."""
    return {tuple(k): v for k, v in counts.items()}


def package_gh_counts(tables) -> dict[str, dict]:
    index = build_project_index(tables["projects"])
    return {
        "num_projects": as_plain(count_new_projects(tables["projects"])),
        "num_users": as_plain(count_new_users(tables["projects"],
                                              tables["commits"], index)),
        "num_commits": as_plain(count_commits(tables["commits"], index)),
        "num_pull_requests": as_plain(count_pull_requests(
            tables["pull_requests"], tables["pull_request_history"], index)),
        "num_pending_issues": as_plain(count_pending_issues(
            tables["issues"], tables["issue_events"], index)),
    }


def oracle_gh_counts(tables) -> dict[str, dict]:
    projects = tables["projects"]
    return {
        "num_projects": oracle.gh_num_projects(projects),
        "num_users": oracle.gh_num_users(projects, tables["commits"]),
        "num_commits": oracle.gh_num_commits(projects, tables["commits"]),
        "num_pull_requests": oracle.gh_num_pull_requests(
            projects, tables["pull_requests"], tables["pull_request_history"]),
        "num_pending_issues": oracle.gh_num_pending_issues(
            projects, tables["issues"], tables["issue_events"]),
    }


def package_so_counts(tables, aliases, allowed) -> dict[str, dict]:
    questions = list(prepare_questions(tables["posts"], aliases, allowed))
    answers = load_answer_links(tables.get("answers", []))
    return {
        "num_questions": as_plain(count_questions(questions)),
        "num_users": as_plain(count_new_so_users(questions)),
        "num_answers": as_plain(count_answers(questions)),
        "total_score": as_plain(sum_scores(questions)),
        "num_unanswered": as_plain(count_unanswered(questions)),
        "response_time": {tuple(k): v for k, v in
                          avg_response_time(questions, answers).items()},
    }


def oracle_so_counts(tables, aliases, allowed) -> dict[str, dict]:
    rows = oracle.so_table(tables, aliases, allowed)
    out = {name: {} for name in ("num_questions", "num_users", "num_answers",
                                 "total_score", "num_unanswered",
                                 "response_time")}
    for lang, year, users, questions, answers, score, unanswered, rt in rows:
        key = (lang, year)
        out["num_questions"][key] = questions
        # users and unanswered increment by at least one per observation, so
        # the package stores no explicit zeros for them — the table rows do.
        if users:
            out["num_users"][key] = users
        out["num_answers"][key] = answers
        out["total_score"][key] = score
        if unanswered:
            out["num_unanswered"][key] = unanswered
        if rt is not None:
            out["response_time"][key] = rt
    return out


def drop_zeroes(counts: dict) -> dict:
    return {k: v for k, v in counts.items() if v != 0}
