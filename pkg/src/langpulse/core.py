"""Shared grouping keys and mergeable accumulators used by both metric sides."""

from __future__ import annotations

from typing import Hashable, Iterable, NamedTuple


class LangYear(NamedTuple):
    """The universal grouping key: canonical language name plus calendar year."""

    language: str
    year: int


class PartialCounts:
    """A mergeable key -> count map.

    Merging is field-wise addition, so partials computed over any partitioning
    of an input stream combine into the same totals. Values may be negative
    (post scores), which is why this is not a collections.Counter.
    """

    def __init__(self, counts: dict[Hashable, int] | None = None):
        self.counts: dict[Hashable, int] = dict(counts) if counts else {}

    def add(self, key: Hashable, n: int = 1) -> None:
        self.counts[key] = self.counts.get(key, 0) + n

    def merge(self, other: "PartialCounts") -> None:
        for key, n in other.counts.items():
            self.add(key, n)

    @classmethod
    def merged(cls, parts: Iterable["PartialCounts"]) -> "PartialCounts":
        out = cls()
        for part in parts:
            out.merge(part)
        return out

    def get(self, key: Hashable, default: int = 0) -> int:
        return self.counts.get(key, default)

    def items(self):
        return self.counts.items()

    def keys(self):
        return self.counts.keys()

    def total(self) -> int:
        return sum(self.counts.values())

    def __getitem__(self, key: Hashable) -> int:
        return self.counts[key]

    def __contains__(self, key: Hashable) -> bool:
        return key in self.counts

    def __len__(self) -> int:
        return len(self.counts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PartialCounts):
            return NotImplemented
        return self.counts == other.counts

    def __repr__(self) -> str:
        return f"PartialCounts({self.counts!r})"


class FirstYearTracker:
    """Tracks the earliest year an actor touched a language.

    Used for the "new users" metrics on both platforms: a user belongs to the
    (language, year) of their first qualifying event. Merge keeps the minimum
    year per (actor, language), so partition order never matters.
    """

    def __init__(self):
        self.first: dict[tuple[Hashable, str], int] = {}

    def observe(self, actor: Hashable, language: str, year: int) -> None:
        key = (actor, language)
        prev = self.first.get(key)
        if prev is None or year < prev:
            self.first[key] = year

    def merge(self, other: "FirstYearTracker") -> None:
        for (actor, language), year in other.first.items():
            self.observe(actor, language, year)

    def finalize(self) -> PartialCounts:
        counts = PartialCounts()
        for (_actor, language), year in self.first.items():
            counts.add(LangYear(language, year))
        return counts
