"""Series transforms: top-K selection, normalization, differencing, orientation."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from langpulse.core import LangYear, PartialCounts
from langpulse.transform import (
    DIFFERENCED,
    HIGHER_BETTER,
    LEVEL,
    LOWER_BETTER,
    NORMALIZED,
    RAW,
    MetricSeries,
    first_difference,
    min_max_normalize,
    orient,
    read_normalization_params,
    series_from_counts,
    top_k_languages,
    write_normalization_params,
)


def series(cells, orientation=HIGHER_BETTER, mode=LEVEL, scale=RAW):
    return MetricSeries("m", {LangYear(l, y): v for (l, y), v in cells.items()},
                        orientation=orientation, mode=mode, scale=scale)


class TestTopK:
    def test_orders_by_total_then_name(self):
        counts = PartialCounts({LangYear("b", 2015): 5, LangYear("b", 2016): 5,
                                LangYear("a", 2015): 10, LangYear("c", 2015): 11})
        # totals: c=11, a=10, b=10 — the a/b tie breaks alphabetically
        assert top_k_languages(counts, 2) == ["c", "a"]
        assert top_k_languages(counts, 3) == ["c", "a", "b"]

    def test_ties_resolved_lexicographically(self):
        counts = PartialCounts({LangYear("zig", 2015): 3, LangYear("ada", 2015): 3,
                                LangYear("c", 2015): 3})
        assert top_k_languages(counts, 3) == ["ada", "c", "zig"]

    def test_k_larger_than_population(self):
        counts = PartialCounts({LangYear("go", 2015): 1})
        assert top_k_languages(counts, 50) == ["go"]

    def test_matches_sort_oracle_on_random_tables(self):
        rng = random.Random(42)
        for _ in range(50):
            langs = rng.sample("abcdefghij", rng.randrange(1, 10))
            counts = PartialCounts()
            totals = {}
            for lang in langs:
                for year in range(2014, 2014 + rng.randrange(1, 4)):
                    n = rng.choice([1, 2, 3, 3, 3])  # heavy ties on purpose
                    counts.add(LangYear(lang, year), n)
                    totals[lang] = totals.get(lang, 0) + n
            k = rng.randrange(1, len(langs) + 1)
            expect = sorted(totals, key=lambda l: (-totals[l], l))[:k]
            assert top_k_languages(counts, k) == expect


class TestNormalize:
    def test_bounds_and_params(self):
        normed, params = min_max_normalize(series({("a", 2014): 2.0,
                                                   ("a", 2015): 10.0,
                                                   ("b", 2014): 6.0}))
        assert params.observed_min == 2.0 and params.observed_max == 10.0
        assert normed.cells[LangYear("a", 2014)] == 0.0
        assert normed.cells[LangYear("a", 2015)] == 1.0
        assert normed.cells[LangYear("b", 2014)] == 0.5
        assert normed.scale == NORMALIZED

    def test_constant_series_maps_to_half(self):
        normed, _ = min_max_normalize(series({("a", 2014): 7.0, ("b", 2019): 7.0}))
        assert all(v == 0.5 for v in normed.cells.values())

    def test_pooled_over_all_languages(self):
        normed, _ = min_max_normalize(series({("a", 2014): 0.0, ("b", 2014): 4.0}))
        assert normed.cells[LangYear("b", 2014)] == 1.0

    def test_requires_raw_scale(self):
        normed, _ = min_max_normalize(series({("a", 2014): 1.0, ("a", 2015): 2.0}))
        with pytest.raises(ValueError):
            min_max_normalize(normed)

    def test_rejects_empty_series(self):
        with pytest.raises(ValueError):
            min_max_normalize(series({}))

    @given(st.lists(st.integers(0, 100_000), min_size=2, max_size=30,
                    unique=True),
           st.floats(0.01, 100), st.floats(-100, 100))
    @settings(max_examples=50, deadline=None)
    def test_affine_invariance(self, values, a, b):
        # integer-valued series: the affine map cannot collapse two distinct
        # values into one float, which would degenerate the scaled series
        cells = {("x", 2000 + i): float(v) for i, v in enumerate(values)}
        scaled_cells = {k: a * v + b for k, v in cells.items()}
        base, _ = min_max_normalize(series(cells))
        scaled, _ = min_max_normalize(series(scaled_cells))
        for key in base.cells:
            assert math.isclose(base.cells[key], scaled.cells[key],
                                rel_tol=0, abs_tol=1e-9)


class TestDifference:
    def test_consecutive_years_only(self):
        diff = first_difference(series({("a", 2014): 1.0, ("a", 2015): 4.0,
                                        ("a", 2017): 9.0}))
        assert diff.cells == {LangYear("a", 2015): 3.0}
        assert diff.mode == DIFFERENCED

    def test_gap_breaks_the_chain(self):
        diff = first_difference(series({("a", 2014): 1.0, ("a", 2016): 2.0,
                                        ("a", 2017): 5.0}))
        assert diff.cells == {LangYear("a", 2017): 3.0}

    def test_constant_series_differences_to_zero(self):
        diff = first_difference(series({("a", y): 3.25 for y in range(2014, 2019)}))
        assert all(v == 0.0 for v in diff.cells.values())
        assert len(diff.cells) == 4

    def test_languages_independent(self):
        diff = first_difference(series({("a", 2014): 1.0, ("b", 2015): 9.0}))
        assert diff.cells == {}

    def test_requires_level_mode(self):
        diff = first_difference(series({("a", 2014): 1.0, ("a", 2015): 2.0}))
        with pytest.raises(ValueError):
            first_difference(diff)

    def test_reconstruction_exact_for_integer_series(self):
        rng = random.Random(3)
        cells = {("a", 2000 + i): float(rng.randrange(0, 10**9))
                 for i in range(30)}
        self._assert_reconstructs(cells)

    def test_reconstruction_exact_for_dyadic_series(self):
        # every float in [0,1) from random() is k/2^53, so differences are exact
        rng = random.Random(4)
        cells = {("a", 2000 + i): rng.random() for i in range(30)}
        self._assert_reconstructs(cells)

    def test_reconstruction_within_one_ulp_for_arbitrary_series(self):
        # Exact recovery is impossible in principle once a difference rounds
        # (a + fl(b-a) can land one ulp away from b), so arbitrary values get
        # an ulp bound instead of equality.
        rng = random.Random(5)
        cells = {("a", 2000 + i): rng.random() * 10 ** rng.randrange(-3, 4)
                 for i in range(60)}
        diff = first_difference(series(cells)).cells
        for (_, year), d in sorted(diff.items()):
            prev = cells[("a", year - 1)]
            recon = prev + d
            target = cells[("a", year)]
            # each of the two roundings errs by at most half an ulp of the
            # dominant magnitude, so one such ulp bounds the total
            assert abs(recon - target) <= math.ulp(max(abs(prev), abs(target)))

    def _assert_reconstructs(self, cells):
        diff = first_difference(series(cells)).cells
        years = sorted(y for (_, y) in cells)
        prev = cells[("a", years[0])]
        for year in years[1:]:
            prev = prev + diff[LangYear("a", year)]
            assert prev == cells[("a", year)]


class TestOrient:
    def test_higher_better_untouched(self):
        normed, _ = min_max_normalize(series({("a", 2014): 1.0, ("a", 2015): 3.0}))
        assert orient(normed).cells == normed.cells

    def test_lower_better_flipped(self):
        normed, _ = min_max_normalize(
            series({("a", 2014): 1.0, ("a", 2015): 3.0},
                   orientation=LOWER_BETTER))
        flipped = orient(normed)
        assert flipped.cells[LangYear("a", 2014)] == 1.0
        assert flipped.cells[LangYear("a", 2015)] == 0.0
        assert flipped.orientation == HIGHER_BETTER

    @staticmethod
    def _flip_twice(normed):
        once = orient(normed)
        relabeled = MetricSeries(once.metric_name, once.cells,
                                 orientation=LOWER_BETTER, mode=once.mode,
                                 scale=once.scale)
        return orient(relabeled)

    def test_involution_exact_where_complement_is_exact(self):
        # When 1-v is computed exactly (guaranteed for v >= 0.5, and for
        # dyadic v like 0.25 below), the second flip lands exactly on v.
        normed, _ = min_max_normalize(
            series({("a", 2014): 2.0, ("a", 2015): 4.0, ("a", 2016): 8.0,
                    ("b", 2016): 10.0}, orientation=LOWER_BETTER))
        assert set(normed.cells.values()) == {0.0, 0.25, 0.75, 1.0}
        assert self._flip_twice(normed).cells == normed.cells

    def test_involution_within_float_bound_everywhere(self):
        # For v < 0.5 whose complement rounds, the round trip can be off by
        # the rounding of that first subtraction: at most 2^-53.
        rng = random.Random(9)
        cells = {("a", 2000 + i): rng.random() ** 3 for i in range(200)}
        normed, _ = min_max_normalize(series(cells, orientation=LOWER_BETTER))
        back = self._flip_twice(normed)
        for key, v in normed.cells.items():
            assert abs(back.cells[key] - v) <= 2.0 ** -53
            if v >= 0.5:
                assert back.cells[key] == v

    def test_requires_normalized_scale(self):
        with pytest.raises(ValueError):
            orient(series({("a", 2014): 1.0}))


class TestSeriesHelpers:
    def test_series_from_counts(self):
        counts = PartialCounts({LangYear("go", 2015): 3})
        s = series_from_counts("num_projects", counts)
        assert s.cells == {LangYear("go", 2015): 3.0}
        assert s.metric_name == "num_projects"

    def test_by_language(self):
        s = series({("a", 2014): 1.0, ("a", 2015): 2.0, ("b", 2014): 7.0})
        assert s.by_language() == {"a": {2014: 1.0, 2015: 2.0},
                                   "b": {2014: 7.0}}

    def test_params_round_trip(self, tmp_path):
        _, p1 = min_max_normalize(series({("a", 2014): 1.0, ("a", 2015): 2.0}))
        path = tmp_path / "params.csv"
        write_normalization_params(path, [p1])
        (back,) = read_normalization_params(path)
        assert back == p1
