"""Table schemas, dump-file streaming, record cleaning and language aliasing.

Inputs are GHTorrent-style CSV dumps plus a cleaned StackOverflow posts table
and an optional answer-link file. Streaming is line-based and constant-memory;
bad lines are counted, never fatal.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field, fields as dc_fields
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import IO, Iterable, Iterator, Optional, Union

# Drop reasons returned by clean_record. Cleaning itself never raises.
DROP_NULL_KEY = "null_key"
DROP_BAD_YEAR = "bad_year"
DROP_MALFORMED = "malformed"

# GHTorrent CSV convention: empty field or the literal two-character \N marker.
NULL_MARKERS = ("", "\\N")

DEFAULT_YEAR_RANGE = (2005, 2020)


@dataclass(frozen=True)
class Column:
    name: str
    kind: str  # "integer" | "string" | "timestamp"
    required: bool = False  # null here makes the record undroppable downstream


@dataclass(frozen=True)
class TableDescriptor:
    """Schema of one dump table: ordered columns plus the file glob it loads from.

    year_column names the column holding the record's calendar year; it accepts
    either a bare year or a full timestamp (reduced to its UTC year).
    language_column, when set, is canonicalized through the alias map.
    """

    table_name: str
    columns: tuple[Column, ...]
    source_pattern: str
    year_column: Optional[str] = None
    language_column: Optional[str] = None

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate column names in table {self.table_name}")

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    def index(self, name: str) -> int:
        for i, c in enumerate(self.columns):
            if c.name == name:
                return i
        raise KeyError(f"{self.table_name} has no column {name!r}")


def _cols(*specs: tuple) -> tuple[Column, ...]:
    return tuple(Column(*s) for s in specs)


# The six GitHub tables and the StackOverflow posts table carry exactly the
# columns of the published schemas; "answers" is the optional companion file
# that links answers back to their questions with full timestamps.
TABLES: dict[str, TableDescriptor] = {
    "projects": TableDescriptor(
        "projects",
        _cols(("id", "integer", True), ("owner_id", "integer", True),
              ("language", "string", True), ("year", "integer", True)),
        "projects*.csv", year_column="year", language_column="language",
    ),
    "commits": TableDescriptor(
        "commits",
        _cols(("id", "integer", False), ("author_id", "integer", True),
              ("committer_id", "integer", False), ("project_id", "integer", True),
              ("year", "integer", True)),
        "commits*.csv", year_column="year",
    ),
    "pull_requests": TableDescriptor(
        "pull_requests",
        _cols(("id", "integer", True), ("head_repo_id", "integer", False),
              ("base_repo_id", "integer", True), ("head_commit_id", "integer", False),
              ("base_commit_id", "integer", False), ("pull_request_id", "integer", False)),
        "pull_requests*.csv",
    ),
    "pull_request_history": TableDescriptor(
        "pull_request_history",
        _cols(("id", "integer", False), ("pull_request_id", "integer", True),
              ("action", "string", True), ("actor_id", "integer", False),
              ("year", "integer", True)),
        "pull_request_history*.csv", year_column="year",
    ),
    "issues": TableDescriptor(
        "issues",
        _cols(("id", "integer", True), ("repo_id", "integer", True),
              ("issue_id", "integer", False), ("year", "integer", True)),
        "issues*.csv", year_column="year",
    ),
    "issue_events": TableDescriptor(
        "issue_events",
        _cols(("event_id", "integer", False), ("issue_id", "integer", True),
              ("action", "string", True), ("year", "integer", True)),
        "issue_events*.csv", year_column="year",
    ),
    "posts": TableDescriptor(
        "posts",
        _cols(("_Id", "integer", True), ("_OwnerUserId", "integer", True),
              ("_PostTypeId", "integer", True), ("_Score", "integer", True),
              ("_Tag", "string", True), ("_CreationYear", "integer", True),
              ("_AnswerCount", "integer", True)),
        "posts*.csv", year_column="_CreationYear",
    ),
    "answers": TableDescriptor(
        "answers",
        _cols(("answer_id", "integer", True), ("question_id", "integer", True),
              ("creation_time", "timestamp", True)),
        "answers*.csv", year_column="creation_time",
    ),
}

GH_TABLE_NAMES = ("projects", "commits", "pull_requests", "pull_request_history",
                  "issues", "issue_events")


def describe_table(table_name: str) -> TableDescriptor:
    """Return the schema for one of the known dump tables."""
    try:
        return TABLES[table_name]
    except KeyError:
        raise ValueError(f"unknown table: {table_name!r}") from None


@dataclass
class IngestStats:
    """Per-stream row accounting; rows_read always equals emitted + dropped."""

    rows_read: int = 0
    rows_emitted: int = 0
    rows_dropped_null_key: int = 0
    rows_dropped_bad_year: int = 0
    rows_dropped_malformed: int = 0

    @property
    def rows_dropped(self) -> int:
        return (self.rows_dropped_null_key + self.rows_dropped_bad_year
                + self.rows_dropped_malformed)

    def merge(self, other: "IngestStats") -> None:
        for f in dc_fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))

    def count_drop(self, reason: str) -> None:
        if reason == DROP_NULL_KEY:
            self.rows_dropped_null_key += 1
        elif reason == DROP_BAD_YEAR:
            self.rows_dropped_bad_year += 1
        elif reason == DROP_MALFORMED:
            self.rows_dropped_malformed += 1
        else:
            raise ValueError(f"unknown drop reason: {reason!r}")

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dc_fields(self)}


@dataclass(frozen=True)
class RawRecord:
    """One parsed input line; None marks a null field."""

    values: tuple[Optional[str], ...]


@dataclass(frozen=True)
class CleanRecord:
    """A typed, null-checked record ready for grouping and joining.

    values holds ints for integer columns, strings for string columns and the
    extracted calendar year for the year column; non-required columns may stay
    None. created_at keeps the full UTC timestamp when the source provided one
    (needed for response-time computation on posts and answers).
    """

    table_name: str
    values: tuple
    year: Optional[int]
    created_at: Optional[datetime] = None

    def get(self, descriptor: TableDescriptor, name: str):
        return self.values[descriptor.index(name)]


class LanguageAliasMap:
    """Case-insensitive raw-name -> canonical-language mapping.

    Canonical names are lowercase and map to themselves, so canonicalization
    is idempotent by construction.
    """

    def __init__(self, entries: dict[str, str] | None = None):
        self.entries: dict[str, str] = {}
        for raw, canonical in (entries or {}).items():
            self.add(raw, canonical)

    def add(self, raw: str, canonical: str) -> None:
        raw_key = raw.strip().lower()
        canon = canonical.strip().lower()
        if not raw_key or not canon:
            raise ValueError(f"empty alias entry: {raw!r}={canonical!r}")
        if self.entries.get(canon, canon) != canon:
            raise ValueError(
                f"alias target {canon!r} is itself aliased to {self.entries[canon]!r}")
        if raw_key != canon:
            for r, c in self.entries.items():
                if c == raw_key and r != raw_key:
                    raise ValueError(
                        f"{raw_key!r} is the canonical target of {r!r}, cannot re-alias it")
        self.entries[raw_key] = canon
        self.entries.setdefault(canon, canon)

    def canonicalize(self, name: str) -> str:
        key = name.strip().lower()
        return self.entries.get(key, key)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "LanguageAliasMap":
        """Read an alias file: one raw=canonical pair per line, # comments."""
        amap = cls()
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected raw=canonical, got {line!r}")
            raw, canonical = line.split("=", 1)
            amap.add(raw, canonical)
        return amap

    @classmethod
    def default(cls) -> "LanguageAliasMap":
        ref = resources.files("langpulse").joinpath("data/aliases.txt")
        with resources.as_file(ref) as path:
            return cls.load(path)


def _detect_header(line_fields: list[str], descriptor: TableDescriptor) -> bool:
    if len(line_fields) != len(descriptor.columns):
        return False
    got = [f.strip().lower() for f in line_fields]
    want = [c.name.lower() for c in descriptor.columns]
    return got == want


def stream_records(
    descriptor: TableDescriptor,
    source: Union[IO[str], Iterable[str]],
    delimiter: str = ",",
    stats: Optional[IngestStats] = None,
) -> Iterator[RawRecord]:
    """Yield one RawRecord per input line, skipping malformed lines.

    A line is malformed when its quoting is unbalanced or its field count does
    not match the descriptor. An optional header row (matching the column
    names) is skipped without counting. Memory use is constant in stream
    length: lines are parsed one at a time and never buffered.
    """
    if stats is None:
        stats = IngestStats()
    first = True
    for line in source:
        line = line.rstrip("\r\n")
        if first:
            first = False
            header_probe = next(csv.reader([line], delimiter=delimiter), [])
            if _detect_header(header_probe, descriptor):
                continue
        if not line.strip():
            continue
        stats.rows_read += 1
        if line.count('"') % 2 == 1:
            stats.rows_dropped_malformed += 1
            continue
        try:
            parsed = next(csv.reader([line], delimiter=delimiter, strict=True), [])
        except csv.Error:
            stats.rows_dropped_malformed += 1
            continue
        if len(parsed) != len(descriptor.columns):
            stats.rows_dropped_malformed += 1
            continue
        stats.rows_emitted += 1
        yield RawRecord(tuple(None if f in NULL_MARKERS else f for f in parsed))


def stream_file(
    descriptor: TableDescriptor,
    path: Union[str, Path],
    delimiter: str = ",",
    stats: Optional[IngestStats] = None,
) -> Iterator[RawRecord]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        yield from stream_records(descriptor, fh, delimiter=delimiter, stats=stats)


_TS_Z = re.compile(r"[Zz]$")


def parse_timestamp_utc(text: str) -> datetime:
    """Parse an ISO-8601 or 'YYYY-MM-DD HH:MM:SS' timestamp as UTC.

    Naive timestamps are assumed UTC; aware ones are converted.
    """
    s = _TS_Z.sub("+00:00", text.strip())
    dt = datetime.fromisoformat(s)
    if dt.tzinfo is None:
        return dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def _parse_year_field(text: str) -> tuple[int, Optional[datetime]]:
    """A year column accepts a bare year or a full timestamp."""
    try:
        return int(text), None
    except ValueError:
        dt = parse_timestamp_utc(text)
        return dt.year, dt


def clean_record(
    descriptor: TableDescriptor,
    raw: RawRecord,
    aliases: LanguageAliasMap,
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE,
) -> Union[CleanRecord, str]:
    """Type, null-check and canonicalize one raw record.

    Returns a CleanRecord, or a drop reason string (DROP_NULL_KEY,
    DROP_BAD_YEAR, DROP_MALFORMED) when the record cannot be used. Out-of-range
    years are dropped rather than clamped: clamping would fabricate activity.
    """
    if len(raw.values) != len(descriptor.columns):
        return DROP_MALFORMED
    values: list = []
    year: Optional[int] = None
    created_at: Optional[datetime] = None
    for col, text in zip(descriptor.columns, raw.values):
        if text is None:
            if col.required:
                return DROP_NULL_KEY
            values.append(None)
            continue
        try:
            if col.name == descriptor.year_column:
                y, ts = _parse_year_field(text)
                if not (year_range[0] <= y <= year_range[1]):
                    return DROP_BAD_YEAR
                year = y
                if ts is not None:
                    created_at = ts
                values.append(ts if col.kind == "timestamp" else y)
            elif col.kind == "integer":
                values.append(int(text))
            elif col.kind == "timestamp":
                created_at = parse_timestamp_utc(text)
                values.append(created_at)
            else:
                text = text.strip()
                if col.name == descriptor.language_column:
                    text = aliases.canonicalize(text)
                    if not text:
                        return DROP_NULL_KEY
                values.append(text)
        except ValueError:
            return DROP_MALFORMED
    return CleanRecord(descriptor.table_name, tuple(values), year, created_at)


_TAG_RE = re.compile(r"<([^<>]*)>")


def explode_post_tags(
    raw_tag_field: str,
    aliases: LanguageAliasMap,
    allowed: set[str],
) -> list[str]:
    """Extract the canonical language tags of a post that fall in `allowed`.

    Accepts both the angle-bracket multi-tag form ("<python><pandas>") and a
    pre-exploded single tag. Duplicates collapse; first-appearance order is
    kept so a post contributes once per matched language.
    """
    if "<" in raw_tag_field:
        parts = _TAG_RE.findall(raw_tag_field)
    else:
        parts = [raw_tag_field]
    out: list[str] = []
    seen: set[str] = set()
    for part in parts:
        tag = aliases.canonicalize(part)
        if tag and tag in allowed and tag not in seen:
            seen.add(tag)
            out.append(tag)
    return out


def clean_stream(
    descriptor: TableDescriptor,
    raw_records: Iterable[RawRecord],
    aliases: LanguageAliasMap,
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE,
    stats: Optional[IngestStats] = None,
) -> Iterator[CleanRecord]:
    """Clean a raw-record stream, counting drops in `stats`.

    Note: records rejected here were already counted as emitted by
    stream_records, so the caller accounts them by moving one row from
    emitted to the matching drop counter.
    """
    for raw in raw_records:
        result = clean_record(descriptor, raw, aliases, year_range)
        if isinstance(result, str):
            if stats is not None:
                stats.rows_emitted -= 1
                stats.count_drop(result)
            continue
        yield result


def read_clean_table(
    descriptor: TableDescriptor,
    paths: Iterable[Union[str, Path]],
    aliases: LanguageAliasMap,
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE,
    delimiter: str = ",",
) -> tuple[list[CleanRecord], IngestStats]:
    """Stream, parse and clean every file of one table; stats merge across files."""
    total = IngestStats()
    records: list[CleanRecord] = []
    for path in sorted(str(p) for p in paths):
        stats = IngestStats()
        raw = stream_file(descriptor, path, delimiter=delimiter, stats=stats)
        records.extend(clean_stream(descriptor, raw, aliases, year_range, stats=stats))
        total.merge(stats)
    return records, total
