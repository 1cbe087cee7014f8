"""HTTP API over a loaded metric store.

Every handler reads one immutable store snapshot for the whole request;
swapping in a recomputed store is a single attribute assignment, so
concurrent readers see either the old snapshot or the new one, never a mix.
"""

from __future__ import annotations

from dataclasses import asdict
from typing import Mapping, Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .composite import (HORIZON_YEARS, RecommendationQuery,
                        recommendation_to_doc)
from .pipeline import MetricStore


class StoreHolder:
    """Mutable cell holding the current immutable store snapshot."""

    def __init__(self, store: MetricStore):
        self._store = store

    @property
    def current(self) -> MetricStore:
        return self._store

    def swap(self, store: MetricStore) -> None:
        self._store = store


class RecommendBody(BaseModel):
    goal: str
    horizon: str = "short"
    category: Optional[str] = None
    top_n: int = 10


def _bad_request(message: str) -> HTTPException:
    return HTTPException(status_code=400, detail=message)


def create_app(store: MetricStore | StoreHolder,
               goal_profiles: Optional[Mapping[str, Mapping[str, float]]] = None,
               ) -> FastAPI:
    holder = store if isinstance(store, StoreHolder) else StoreHolder(store)
    app = FastAPI(title="langpulse", docs_url=None, redoc_url=None)
    app.state.holder = holder
    # the bundled dashboard is served from its own origin during development
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["GET", "POST"], allow_headers=["*"])

    @app.get("/api/languages")
    def languages():
        snap = holder.current
        return {"languages": snap.languages, "categories": snap.categories}

    @app.get("/api/metrics")
    def metrics(language: str, metric: str, source: str = "combined",
                mode: str = "level"):
        snap = holder.current
        try:
            series = snap.series(metric, source=source, mode=mode)
        except ValueError as e:
            raise _bad_request(str(e))
        known = set(snap.languages) or {r.key.language for r in snap.composites}
        if language not in known:
            raise HTTPException(status_code=404,
                                detail=f"unknown language {language!r}")
        # A known language may still have an empty series (e.g. diff mode
        # with a single observed year) — that is a 200 with no points.
        by_year = series.by_language().get(language, {})
        return {
            "language": language,
            "metric": metric,
            "source": source,
            "mode": mode,
            "series": [{"year": year, "value": by_year[year]}
                       for year in sorted(by_year)],
        }

    @app.get("/api/profile/{table}")
    def profile(table: str):
        snap = holder.current
        tp = snap.profiles.get(table)
        if tp is None:
            raise HTTPException(status_code=404, detail=f"no profile for table {table!r}")
        return asdict(tp)

    @app.post("/api/recommend")
    def recommend(body: RecommendBody):
        snap = holder.current
        horizon_years = HORIZON_YEARS.get(body.horizon)
        if horizon_years is None:
            raise _bad_request(
                f"unknown horizon {body.horizon!r}; expected one of {sorted(HORIZON_YEARS)}")
        if body.top_n < 1:
            raise _bad_request("top_n must be >= 1")
        category_filter = None
        if body.category is not None:
            try:
                category_filter = snap.languages_in_category(body.category)
            except ValueError as e:
                raise _bad_request(str(e))
        query = RecommendationQuery(goal=body.goal, horizon_years=horizon_years,
                                    category_filter=category_filter,
                                    top_n=body.top_n)
        try:
            rec = snap.recommend(query, goal_profiles)
        except ValueError as e:
            raise _bad_request(str(e))
        return recommendation_to_doc(rec)

    @app.get("/api/health")
    def health():
        snap = holder.current
        return {
            "status": "ok",
            "provenance_sha256": snap.provenance_digest,
            "rows": {"gh": len(snap.gh), "so": len(snap.so),
                     "composites": len(snap.composites)},
            "languages": len(snap.languages),
        }

    return app
