"""The five GitHub intermediate metrics per (language, year).

Large-table joins are done reduce-before-join: the commits stream is first
aggregated on (project_id, year) and only the aggregate is mapped through the
project index, which is equivalent to the direct join but never materializes
it. Every counting stage is a mergeable partial, so inputs may be partitioned
freely and merged deterministically.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, fields as dc_fields
from pathlib import Path
from typing import Iterable, Optional, Union

from .core import FirstYearTracker, LangYear, PartialCounts
from .ingest import CleanRecord, describe_table

_PROJECTS = describe_table("projects")
_COMMITS = describe_table("commits")
_PULL_REQUESTS = describe_table("pull_requests")
_PR_HISTORY = describe_table("pull_request_history")
_ISSUES = describe_table("issues")
_ISSUE_EVENTS = describe_table("issue_events")


@dataclass
class GhIntermediate:
    key: LangYear
    num_users: int = 0
    num_projects: int = 0
    num_commits: int = 0
    num_pull_requests: int = 0
    num_pending_issues: int = 0


@dataclass
class JoinReport:
    """Accounting for rows excluded by unmatched foreign keys.

    Exclusions are surfaced rather than silently dropped; every counter here
    names the relation that failed to resolve.
    """

    duplicate_project_ids: int = 0
    commits_unmatched_project: int = 0
    prs_without_open_event: int = 0
    prs_unmatched_pull_request: int = 0
    prs_unmatched_base_repo: int = 0
    issues_unmatched_repo: int = 0
    issue_events_unknown_issue: int = 0

    def merge(self, other: "JoinReport") -> None:
        for f in dc_fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dc_fields(self)}


class ProjectLanguageIndex:
    """project id -> (canonical language, creation year); first occurrence wins."""

    def __init__(self):
        self.by_id: dict[int, tuple[str, int]] = {}
        self.duplicates = 0

    def add(self, project_id: int, language: str, year: int) -> None:
        if project_id in self.by_id:
            self.duplicates += 1
            return
        self.by_id[project_id] = (language, year)

    def lookup(self, project_id: int) -> Optional[tuple[str, int]]:
        return self.by_id.get(project_id)

    def __len__(self) -> int:
        return len(self.by_id)


def build_project_index(projects: Iterable[CleanRecord],
                        report: Optional[JoinReport] = None) -> ProjectLanguageIndex:
    """Index cleaned project rows for the joins below."""
    idx_id = _PROJECTS.index("id")
    idx_lang = _PROJECTS.index("language")
    idx_year = _PROJECTS.index("year")
    index = ProjectLanguageIndex()
    for rec in projects:
        index.add(rec.values[idx_id], rec.values[idx_lang], rec.values[idx_year])
    if report is not None:
        report.duplicate_project_ids += index.duplicates
    return index


def count_new_projects(projects: Iterable[CleanRecord]) -> PartialCounts:
    """Projects created per (language, creation year)."""
    idx_lang = _PROJECTS.index("language")
    idx_year = _PROJECTS.index("year")
    counts = PartialCounts()
    for rec in projects:
        counts.add(LangYear(rec.values[idx_lang], rec.values[idx_year]))
    return counts


def track_user_first_events(
    projects: Iterable[CleanRecord],
    commits: Iterable[CleanRecord],
    index: ProjectLanguageIndex,
    report: Optional[JoinReport] = None,
) -> FirstYearTracker:
    """Earliest qualifying year per (user, language).

    A user's events are owning a newly created project of a language or
    authoring a commit to a project of that language; the earliest year wins
    and each user counts at most once per language.
    """
    tracker = FirstYearTracker()
    idx_owner = _PROJECTS.index("owner_id")
    idx_lang = _PROJECTS.index("language")
    idx_pyear = _PROJECTS.index("year")
    for rec in projects:
        tracker.observe(rec.values[idx_owner], rec.values[idx_lang], rec.values[idx_pyear])
    idx_author = _COMMITS.index("author_id")
    idx_pid = _COMMITS.index("project_id")
    idx_cyear = _COMMITS.index("year")
    for rec in commits:
        hit = index.lookup(rec.values[idx_pid])
        if hit is None:
            if report is not None:
                report.commits_unmatched_project += 1
            continue
        tracker.observe(rec.values[idx_author], hit[0], rec.values[idx_cyear])
    return tracker


def count_new_users(
    projects: Iterable[CleanRecord],
    commits: Iterable[CleanRecord],
    index: ProjectLanguageIndex,
    report: Optional[JoinReport] = None,
) -> PartialCounts:
    return track_user_first_events(projects, commits, index, report).finalize()


def reduce_commits(commits: Iterable[CleanRecord]) -> PartialCounts:
    """Stage 1 of the commit count: aggregate on (project_id, year) first."""
    idx_pid = _COMMITS.index("project_id")
    idx_year = _COMMITS.index("year")
    reduced = PartialCounts()
    for rec in commits:
        reduced.add((rec.values[idx_pid], rec.values[idx_year]))
    return reduced


def map_commit_counts(reduced: PartialCounts, index: ProjectLanguageIndex,
                      report: Optional[JoinReport] = None) -> PartialCounts:
    """Stage 2: map pre-aggregated (project_id, year) counts onto languages."""
    counts = PartialCounts()
    for (project_id, year), n in reduced.items():
        hit = index.lookup(project_id)
        if hit is None:
            if report is not None:
                report.commits_unmatched_project += n
            continue
        counts.add(LangYear(hit[0], year), n)
    return counts


def count_commits(commits: Iterable[CleanRecord], index: ProjectLanguageIndex,
                  report: Optional[JoinReport] = None) -> PartialCounts:
    """Commits per (language, year), via the two-stage reduce-before-join."""
    return map_commit_counts(reduce_commits(commits), index, report)


class MinYearTracker:
    """key -> earliest year; merge keeps the minimum."""

    def __init__(self):
        self.years: dict[int, int] = {}

    def observe(self, key: int, year: int) -> None:
        prev = self.years.get(key)
        if prev is None or year < prev:
            self.years[key] = year

    def merge(self, other: "MinYearTracker") -> None:
        for key, year in other.years.items():
            self.observe(key, year)


def track_pr_open_years(history: Iterable[CleanRecord]) -> MinYearTracker:
    """Earliest "opened" action year per pull request; reopens do not count again."""
    idx_pr = _PR_HISTORY.index("pull_request_id")
    idx_action = _PR_HISTORY.index("action")
    idx_year = _PR_HISTORY.index("year")
    tracker = MinYearTracker()
    for rec in history:
        if rec.values[idx_action].lower() == "opened":
            tracker.observe(rec.values[idx_pr], rec.values[idx_year])
    return tracker


def count_pull_requests(
    pull_requests: Iterable[CleanRecord],
    history: Iterable[CleanRecord],
    index: ProjectLanguageIndex,
    report: Optional[JoinReport] = None,
) -> PartialCounts:
    """Pull requests per (base repo language, year of earliest open)."""
    opened = track_pr_open_years(history)
    idx_id = _PULL_REQUESTS.index("id")
    idx_base = _PULL_REQUESTS.index("base_repo_id")
    base_repo: dict[int, int] = {}
    for rec in pull_requests:
        base_repo.setdefault(rec.values[idx_id], rec.values[idx_base])
    counts = PartialCounts()
    for pr_id, year in opened.years.items():
        repo_id = base_repo.get(pr_id)
        if repo_id is None:
            if report is not None:
                report.prs_unmatched_pull_request += 1
            continue
        hit = index.lookup(repo_id)
        if hit is None:
            if report is not None:
                report.prs_unmatched_base_repo += 1
            continue
        counts.add(LangYear(hit[0], year))
    if report is not None:
        report.prs_without_open_event += sum(
            1 for pr_id in base_repo if pr_id not in opened.years)
    return counts


class IssueStateTracker:
    """Per-issue close/reopen evidence at year granularity.

    An issue is pending at dataset end iff it has no "closed" event, or a
    "reopened" event strictly after its last close (at year granularity:
    max reopen year > max close year). Order-independent, so partitioned
    event streams merge exactly.
    """

    RELEVANT = ("closed", "reopened")

    def __init__(self):
        self.state: dict[int, list[Optional[int]]] = {}

    def observe(self, issue_id: int, action: str, year: int) -> None:
        action = action.lower()
        if action not in self.RELEVANT:
            return
        slot = 0 if action == "closed" else 1
        entry = self.state.setdefault(issue_id, [None, None])
        if entry[slot] is None or year > entry[slot]:
            entry[slot] = year

    def merge(self, other: "IssueStateTracker") -> None:
        for issue_id, (closed, reopened) in other.state.items():
            if closed is not None:
                self.observe(issue_id, "closed", closed)
            if reopened is not None:
                self.observe(issue_id, "reopened", reopened)

    def is_pending(self, issue_id: int) -> bool:
        entry = self.state.get(issue_id)
        if entry is None or entry[0] is None:
            return True
        return entry[1] is not None and entry[1] > entry[0]


def track_issue_states(issue_events: Iterable[CleanRecord]) -> IssueStateTracker:
    idx_issue = _ISSUE_EVENTS.index("issue_id")
    idx_action = _ISSUE_EVENTS.index("action")
    idx_year = _ISSUE_EVENTS.index("year")
    tracker = IssueStateTracker()
    for rec in issue_events:
        tracker.observe(rec.values[idx_issue], rec.values[idx_action], rec.values[idx_year])
    return tracker


def count_pending_issues(
    issues: Iterable[CleanRecord],
    issue_events: Iterable[CleanRecord],
    index: ProjectLanguageIndex,
    report: Optional[JoinReport] = None,
) -> PartialCounts:
    """Issues opened per (language, creation year) and never closed to date."""
    states = track_issue_states(issue_events)
    idx_id = _ISSUES.index("id")
    idx_repo = _ISSUES.index("repo_id")
    idx_year = _ISSUES.index("year")
    counts = PartialCounts()
    seen_issue_ids: set[int] = set()
    for rec in issues:
        issue_id = rec.values[idx_id]
        seen_issue_ids.add(issue_id)
        hit = index.lookup(rec.values[idx_repo])
        if hit is None:
            if report is not None:
                report.issues_unmatched_repo += 1
            continue
        if states.is_pending(issue_id):
            counts.add(LangYear(hit[0], rec.values[idx_year]))
    if report is not None:
        report.issue_events_unknown_issue += sum(
            1 for issue_id in states.state if issue_id not in seen_issue_ids)
    return counts


def assemble_gh_intermediate(
    num_users: PartialCounts,
    num_projects: PartialCounts,
    num_commits: PartialCounts,
    num_pull_requests: PartialCounts,
    num_pending_issues: PartialCounts,
    languages: Optional[Iterable[str]] = None,
) -> list[GhIntermediate]:
    """One row per observed key, sorted by (language, year).

    When `languages` is given (the top-K filter), keys outside it are left out.
    """
    partials = {
        "num_users": num_users,
        "num_projects": num_projects,
        "num_commits": num_commits,
        "num_pull_requests": num_pull_requests,
        "num_pending_issues": num_pending_issues,
    }
    keep = set(languages) if languages is not None else None
    keys: set[LangYear] = set()
    for counts in partials.values():
        keys.update(counts.keys())
    rows = []
    for key in sorted(keys):
        if keep is not None and key.language not in keep:
            continue
        rows.append(GhIntermediate(
            key=key,
            **{name: counts.get(key) for name, counts in partials.items()},
        ))
    return rows


GH_CSV_HEADER = ("language", "year", "num_users", "num_projects", "num_commits",
                 "num_pull_requests", "num_pending_issues")


def write_gh_intermediate(path: Union[str, Path], rows: list[GhIntermediate]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(GH_CSV_HEADER)
        for r in rows:
            writer.writerow([r.key.language, r.key.year, r.num_users, r.num_projects,
                             r.num_commits, r.num_pull_requests, r.num_pending_issues])


def read_gh_intermediate(path: Union[str, Path]) -> list[GhIntermediate]:
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(GhIntermediate(
                key=LangYear(rec["language"], int(rec["year"])),
                num_users=int(rec["num_users"]),
                num_projects=int(rec["num_projects"]),
                num_commits=int(rec["num_commits"]),
                num_pull_requests=int(rec["num_pull_requests"]),
                num_pending_issues=int(rec["num_pending_issues"]),
            ))
    return rows
