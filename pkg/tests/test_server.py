"""HTTP API handlers against a loaded store, via the in-process test client."""

import hashlib
from dataclasses import asdict
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from langpulse.composite import (GOAL_PROFILES, RecommendationQuery,
                                 recommendation_to_doc, CompositeScores)
from langpulse.core import LangYear
from langpulse.pipeline import MetricStore
from langpulse.server import StoreHolder, create_app


@pytest.fixture(scope="module")
def client(fixture_store):
    return TestClient(create_app(fixture_store))


def minimal_store(tmp_path: Path) -> MetricStore:
    return MetricStore(
        output_dir=tmp_path,
        composites=[CompositeScores(LangYear("solo", 2018), popularity=0.5,
                                    community=0.5, demand_shortage=0.5)],
        top_languages=[("solo", 1)],
    )


class TestHealth:
    def test_reports_store_shape(self, client, fixture_store, fixture_cfg):
        doc = client.get("/api/health").json()
        assert doc["status"] == "ok"
        assert doc["rows"] == {"gh": len(fixture_store.gh),
                               "so": len(fixture_store.so),
                               "composites": len(fixture_store.composites)}
        assert doc["languages"] == len(fixture_store.languages)

    def test_digest_matches_provenance_file(self, client, fixture_cfg):
        raw = (Path(fixture_cfg.output_dir) / "provenance.json").read_bytes()
        doc = client.get("/api/health").json()
        assert doc["provenance_sha256"] == hashlib.sha256(raw).hexdigest()


class TestLanguages:
    def test_rank_order_and_categories(self, client, fixture_store):
        doc = client.get("/api/languages").json()
        assert doc["languages"] == fixture_store.languages
        assert doc["categories"] == fixture_store.categories


class TestMetrics:
    @pytest.mark.parametrize("metric,source,mode", [
        ("popularity", "combined", "level"),
        ("availability", "gh", "level"),
        ("community", "so", "level"),
        ("demand", "combined", "diff"),
        ("demand_shortage", "combined", "level"),
        ("community", "combined", "diff"),
    ])
    def test_parity_with_store_series(self, client, fixture_store, metric,
                                      source, mode):
        series = fixture_store.series(metric, source=source, mode=mode)
        for language in fixture_store.languages:
            resp = client.get("/api/metrics", params={
                "language": language, "metric": metric,
                "source": source, "mode": mode})
            assert resp.status_code == 200
            doc = resp.json()
            assert doc["language"] == language
            by_year = series.by_language().get(language, {})
            assert doc["series"] == [
                {"year": year, "value": pytest.approx(by_year[year])}
                for year in sorted(by_year)]

    def test_unknown_language_404(self, client):
        resp = client.get("/api/metrics", params={
            "language": "befunge", "metric": "popularity"})
        assert resp.status_code == 404

    @pytest.mark.parametrize("params", [
        {"language": "python", "metric": "stardom"},
        {"language": "python", "metric": "popularity", "source": "reddit"},
        {"language": "python", "metric": "popularity", "mode": "sideways"},
        {"language": "python", "metric": "demand_shortage", "source": "gh"},
    ])
    def test_invalid_selector_400(self, client, params):
        assert client.get("/api/metrics", params=params).status_code == 400

    def test_empty_series_is_200(self, tmp_path):
        # one observed year: differencing leaves nothing, not an error
        app = create_app(minimal_store(tmp_path))
        with TestClient(app) as solo_client:
            resp = solo_client.get("/api/metrics", params={
                "language": "solo", "metric": "popularity", "mode": "diff"})
            assert resp.status_code == 200
            assert resp.json()["series"] == []


class TestProfile:
    def test_matches_store_profile(self, client, fixture_store):
        for table in ("projects", "posts"):
            doc = client.get(f"/api/profile/{table}").json()
            assert doc == asdict(fixture_store.profiles[table])

    def test_unknown_table_404(self, client):
        assert client.get("/api/profile/meteorites").status_code == 404


class TestRecommend:
    @pytest.mark.parametrize("body,horizon_years", [
        ({"goal": "learn", "horizon": "short"}, 1),
        ({"goal": "build", "horizon": "medium", "top_n": 3}, 3),
        ({"goal": "learn", "horizon": "long", "category": "systems"}, 5),
    ])
    def test_parity_with_store(self, client, fixture_store, body,
                               horizon_years):
        resp = client.post("/api/recommend", json=body)
        assert resp.status_code == 200
        category_filter = None
        if "category" in body:
            category_filter = fixture_store.languages_in_category(
                body["category"])
        query = RecommendationQuery(goal=body["goal"],
                                    horizon_years=horizon_years,
                                    category_filter=category_filter,
                                    top_n=body.get("top_n", 10))
        want = recommendation_to_doc(fixture_store.recommend(query))
        assert resp.json() == want

    @pytest.mark.parametrize("body", [
        {"goal": "conquer", "horizon": "short"},
        {"goal": "learn", "horizon": "someday"},
        {"goal": "learn", "horizon": "short", "top_n": 0},
        {"goal": "learn", "horizon": "short", "category": "esoteric"},
    ])
    def test_bad_query_400(self, client, body):
        assert client.post("/api/recommend", json=body).status_code == 400

    def test_custom_goal_profiles(self, fixture_store):
        profiles = {"steady": {"availability": 1.0}}
        app = create_app(fixture_store, goal_profiles=profiles)
        with TestClient(app) as custom_client:
            resp = custom_client.post("/api/recommend",
                                      json={"goal": "steady"})
            assert resp.status_code == 200
            want = recommendation_to_doc(fixture_store.recommend(
                RecommendationQuery(goal="steady", horizon_years=1),
                profiles))
            assert resp.json() == want
            # the defaults are replaced, not extended
            assert custom_client.post(
                "/api/recommend", json={"goal": "learn"}).status_code == 400


class TestStoreSwap:
    def test_swap_changes_responses(self, fixture_store, tmp_path):
        holder = StoreHolder(fixture_store)
        app = create_app(holder)
        with TestClient(app) as swap_client:
            before = swap_client.get("/api/languages").json()["languages"]
            assert before == fixture_store.languages
            holder.swap(minimal_store(tmp_path))
            after = swap_client.get("/api/languages").json()["languages"]
            assert after == ["solo"]
            health = swap_client.get("/api/health").json()
            assert health["rows"]["composites"] == 1
