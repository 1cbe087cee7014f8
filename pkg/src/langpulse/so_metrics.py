"""The six StackOverflow intermediate metrics per (language tag, year).

Questions arrive as cleaned post rows; a question tagged with k matched
languages contributes fully to each of them. Response times need the optional
answer-link side input plus full question timestamps; without either, the
metric is reported absent instead of being fabricated from year granularity.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Iterable, Iterator, Optional, Union

from .core import FirstYearTracker, LangYear, PartialCounts
from .ingest import CleanRecord, LanguageAliasMap, describe_table, explode_post_tags

_POSTS = describe_table("posts")
_ANSWERS = describe_table("answers")


@dataclass
class SoIntermediate:
    key: LangYear
    num_users: int = 0
    num_questions: int = 0
    num_answers: int = 0
    total_score: int = 0
    num_unanswered_questions: int = 0
    avg_response_time_hours: Optional[float] = None


@dataclass(frozen=True)
class QuestionRow:
    """A cleaned question with its matched canonical language tags."""

    post_id: int
    owner_user_id: int
    year: int
    score: int
    answer_count: int
    tags: tuple[str, ...]
    created_at: Optional[datetime] = None


@dataclass(frozen=True)
class AnswerLink:
    answer_id: int
    question_id: int
    creation_time: datetime


@dataclass
class PostFilterReport:
    non_question_rows: int = 0
    rows_without_matched_tag: int = 0

    def as_dict(self) -> dict:
        return {"non_question_rows": self.non_question_rows,
                "rows_without_matched_tag": self.rows_without_matched_tag}


def prepare_questions(
    posts: Iterable[CleanRecord],
    aliases: LanguageAliasMap,
    allowed: set[str],
    report: Optional[PostFilterReport] = None,
) -> Iterator[QuestionRow]:
    """Turn cleaned post rows into question rows with exploded language tags.

    Rows that are not questions (_PostTypeId != 1) or match none of the
    allowed languages are filtered out and counted.
    """
    idx_id = _POSTS.index("_Id")
    idx_owner = _POSTS.index("_OwnerUserId")
    idx_type = _POSTS.index("_PostTypeId")
    idx_score = _POSTS.index("_Score")
    idx_tag = _POSTS.index("_Tag")
    idx_year = _POSTS.index("_CreationYear")
    idx_answers = _POSTS.index("_AnswerCount")
    for rec in posts:
        if rec.values[idx_type] != 1:
            if report is not None:
                report.non_question_rows += 1
            continue
        tags = explode_post_tags(rec.values[idx_tag], aliases, allowed)
        if not tags:
            if report is not None:
                report.rows_without_matched_tag += 1
            continue
        yield QuestionRow(
            post_id=rec.values[idx_id],
            owner_user_id=rec.values[idx_owner],
            year=rec.values[idx_year],
            score=rec.values[idx_score],
            answer_count=rec.values[idx_answers],
            tags=tuple(tags),
            created_at=rec.created_at,
        )


def load_answer_links(records: Iterable[CleanRecord]) -> list[AnswerLink]:
    idx_aid = _ANSWERS.index("answer_id")
    idx_qid = _ANSWERS.index("question_id")
    idx_ts = _ANSWERS.index("creation_time")
    # A bare-year creation_time cleans to None; such a link cannot anchor a
    # response-time gap, so it is unusable here.
    return [AnswerLink(rec.values[idx_aid], rec.values[idx_qid], rec.values[idx_ts])
            for rec in records if rec.values[idx_ts] is not None]


def count_questions(questions: Iterable[QuestionRow]) -> PartialCounts:
    counts = PartialCounts()
    for q in questions:
        for tag in q.tags:
            counts.add(LangYear(tag, q.year))
    return counts


def track_so_user_first_years(questions: Iterable[QuestionRow]) -> FirstYearTracker:
    tracker = FirstYearTracker()
    for q in questions:
        for tag in q.tags:
            tracker.observe(q.owner_user_id, tag, q.year)
    return tracker


def count_new_so_users(questions: Iterable[QuestionRow]) -> PartialCounts:
    """Users counted at the earliest year they asked under each language tag."""
    return track_so_user_first_years(questions).finalize()


def count_answers(questions: Iterable[QuestionRow]) -> PartialCounts:
    """Answers attributed to the question's creation year and tags.

    The posts schema carries answer counts on questions only, which forces
    this attribution; an answer written years later still counts against the
    question's own year.
    """
    counts = PartialCounts()
    for q in questions:
        for tag in q.tags:
            counts.add(LangYear(tag, q.year), q.answer_count)
    return counts


def sum_scores(questions: Iterable[QuestionRow]) -> PartialCounts:
    """Signed score totals; negative scores are kept as-is."""
    counts = PartialCounts()
    for q in questions:
        for tag in q.tags:
            counts.add(LangYear(tag, q.year), q.score)
    return counts


def count_unanswered(questions: Iterable[QuestionRow]) -> PartialCounts:
    counts = PartialCounts()
    for q in questions:
        if q.answer_count == 0:
            for tag in q.tags:
                counts.add(LangYear(tag, q.year))
    return counts


class ResponseTimeAccumulator:
    """Mergeable (sum of hours, answered-question count) per key."""

    def __init__(self):
        self.sums: dict[LangYear, float] = {}
        self.counts: dict[LangYear, int] = {}

    def observe(self, key: LangYear, hours: float) -> None:
        self.sums[key] = self.sums.get(key, 0.0) + hours
        self.counts[key] = self.counts.get(key, 0) + 1

    def merge(self, other: "ResponseTimeAccumulator") -> None:
        for key, total in other.sums.items():
            self.sums[key] = self.sums.get(key, 0.0) + total
            self.counts[key] = self.counts.get(key, 0) + other.counts[key]

    def finalize(self) -> dict[LangYear, float]:
        return {key: self.sums[key] / self.counts[key] for key in self.sums}


def avg_response_time(
    questions: Iterable[QuestionRow],
    answers: Iterable[AnswerLink],
) -> dict[LangYear, float]:
    """Mean hours from question creation to its earliest answer, per key.

    Questions without a full creation timestamp or without any linked answer
    are left out of the mean; negative gaps (clock skew) clamp to zero.
    Returns an empty mapping when the inputs cannot support the metric.
    """
    earliest: dict[int, datetime] = {}
    for link in answers:
        prev = earliest.get(link.question_id)
        if prev is None or link.creation_time < prev:
            earliest[link.question_id] = link.creation_time
    acc = ResponseTimeAccumulator()
    for q in questions:
        if q.created_at is None:
            continue
        first = earliest.get(q.post_id)
        if first is None:
            continue
        hours = max(0.0, (first - q.created_at).total_seconds() / 3600.0)
        for tag in q.tags:
            acc.observe(LangYear(tag, q.year), hours)
    return acc.finalize()


def assemble_so_intermediate(
    num_users: PartialCounts,
    num_questions: PartialCounts,
    num_answers: PartialCounts,
    total_score: PartialCounts,
    num_unanswered: PartialCounts,
    response_times: dict[LangYear, float],
) -> list[SoIntermediate]:
    """One row per key present in any partial; counts default to 0, the
    response time stays absent where unavailable."""
    keys: set[LangYear] = set()
    for counts in (num_users, num_questions, num_answers, total_score, num_unanswered):
        keys.update(counts.keys())
    keys.update(response_times.keys())
    return [
        SoIntermediate(
            key=key,
            num_users=num_users.get(key),
            num_questions=num_questions.get(key),
            num_answers=num_answers.get(key),
            total_score=total_score.get(key),
            num_unanswered_questions=num_unanswered.get(key),
            avg_response_time_hours=response_times.get(key),
        )
        for key in sorted(keys)
    ]


SO_CSV_HEADER = ("language", "year", "num_users", "num_questions", "num_answers",
                 "total_score", "num_unanswered_questions", "avg_response_time_hours")


def write_so_intermediate(path: Union[str, Path], rows: list[SoIntermediate]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SO_CSV_HEADER)
        for r in rows:
            rt = "" if r.avg_response_time_hours is None else repr(r.avg_response_time_hours)
            writer.writerow([r.key.language, r.key.year, r.num_users, r.num_questions,
                             r.num_answers, r.total_score, r.num_unanswered_questions, rt])


def read_so_intermediate(path: Union[str, Path]) -> list[SoIntermediate]:
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for rec in csv.DictReader(fh):
            rt = rec["avg_response_time_hours"]
            rows.append(SoIntermediate(
                key=LangYear(rec["language"], int(rec["year"])),
                num_users=int(rec["num_users"]),
                num_questions=int(rec["num_questions"]),
                num_answers=int(rec["num_answers"]),
                total_score=int(rec["total_score"]),
                num_unanswered_questions=int(rec["num_unanswered_questions"]),
                avg_response_time_hours=None if rt == "" else float(rt),
            ))
    return rows
