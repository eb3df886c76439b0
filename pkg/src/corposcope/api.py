"""HTTP API over the snapshot store.

Read-only except POST /runs, which ingests-or-loads a corpus and runs
the full pipeline. Every response carries the snapshot id and the
config echo, so any number shown downstream is traceable to its exact
parameters.
"""

from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import corpus as corpus_mod
from .config import AnalysisConfig
from .keywords import UnknownKeywordError
from .pipeline import (
    NotComputed,
    SnapshotStore,
    UnknownResource,
    UnknownSnapshot,
    query_snapshot,
    run_pipeline,
)


class ResourceResponse(BaseModel):
    snapshot_id: str
    config: dict
    result: Any


class SnapshotSummary(BaseModel):
    snapshot_id: str
    created_at: str
    corpus_digest: str
    skipped: dict[str, str]


class SnapshotList(BaseModel):
    snapshots: list[SnapshotSummary]


class RunRequest(BaseModel):
    corpus_path: Optional[str] = None     # corpus snapshot JSON (from ingest)
    articles_path: Optional[str] = None   # or raw CSV inputs
    citations_path: Optional[str] = None
    config: Optional[dict] = None
    seed: Optional[int] = None


class RunResponse(BaseModel):
    snapshot_id: str
    config: dict
    created: bool
    skipped: dict[str, str]


def create_app(workspace) -> FastAPI:
    store = SnapshotStore(workspace)
    app = FastAPI(title="corposcope", version="0.1.0")
    # the exploration frontend is served from its own origin in development
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["GET", "POST"], allow_headers=["*"]
    )

    def envelope(snapshot_id: str, resource: str, params: dict = None) -> ResourceResponse:
        try:
            meta = store.meta(snapshot_id)
            result = query_snapshot(store, snapshot_id, resource, params)
        except UnknownSnapshot as err:
            raise HTTPException(status_code=404, detail=f"unknown snapshot {err.args[0]!r}") from err
        except NotComputed as err:
            result = {"status": "not computed", "reason": err.reason}
            return ResourceResponse(
                snapshot_id=snapshot_id, config=store.meta(snapshot_id)["config"], result=result
            )
        except UnknownKeywordError as err:
            raise HTTPException(
                status_code=404,
                detail={"error": str(err), "suggestions": err.suggestions},
            ) from err
        except UnknownResource as err:
            raise HTTPException(status_code=404, detail=f"unknown resource: {err.args[0]}") from err
        return ResourceResponse(snapshot_id=snapshot_id, config=meta["config"], result=result)

    @app.get("/snapshots", response_model=SnapshotList)
    def list_snapshots():
        return SnapshotList(snapshots=[SnapshotSummary(**meta) for meta in store.list()])

    @app.post("/runs", response_model=RunResponse)
    def trigger_run(request: RunRequest):
        if request.corpus_path:
            corpus = corpus_mod.read_snapshot(request.corpus_path)
            base = Path(request.corpus_path).parent
        elif request.articles_path:
            corpus = corpus_mod.load_corpus(request.articles_path, request.citations_path)
            base = Path(request.articles_path).parent
        else:
            raise HTTPException(status_code=422, detail="corpus_path or articles_path required")
        config = AnalysisConfig.from_json(request.config)
        if request.seed is not None:
            config.seed = request.seed
        existing = {meta["snapshot_id"] for meta in store.list()}
        snapshot = run_pipeline(corpus, config, fulltext_base=base)
        store.save(snapshot)
        return RunResponse(
            snapshot_id=snapshot.snapshot_id,
            config=snapshot.config.to_json(),
            created=snapshot.snapshot_id not in existing,
            skipped=snapshot.skipped,
        )

    @app.get("/{snapshot_id}/corpus/stats", response_model=ResourceResponse)
    def corpus_stats(snapshot_id: str):
        return envelope(snapshot_id, "corpus/stats")

    @app.get("/{snapshot_id}/geo/flows", response_model=ResourceResponse)
    def geo_flows(snapshot_id: str):
        return envelope(snapshot_id, "geo/flows")

    @app.get("/{snapshot_id}/networks/keywords", response_model=ResourceResponse)
    def keyword_network(snapshot_id: str):
        return envelope(snapshot_id, "networks/keywords")

    @app.get("/{snapshot_id}/networks/keywords/field/{keyword}", response_model=ResourceResponse)
    def keyword_field(snapshot_id: str, keyword: str):
        return envelope(snapshot_id, f"networks/keywords/field/{keyword}")

    @app.get("/{snapshot_id}/networks/citations", response_model=ResourceResponse)
    def citation_network(snapshot_id: str):
        return envelope(snapshot_id, "networks/citations")

    @app.get("/{snapshot_id}/articles/{article_id}/wordcloud", response_model=ResourceResponse)
    def wordcloud(snapshot_id: str, article_id: str):
        return envelope(snapshot_id, f"articles/{article_id}/wordcloud")

    @app.get("/{snapshot_id}/topics", response_model=ResourceResponse)
    def topics(snapshot_id: str):
        return envelope(snapshot_id, "topics")

    @app.get("/{snapshot_id}/topics/evolution", response_model=ResourceResponse)
    def topic_evolution(snapshot_id: str, threshold: Optional[float] = Query(default=None)):
        params = {} if threshold is None else {"threshold": threshold}
        return envelope(snapshot_id, "topics/evolution", params)

    @app.get("/{snapshot_id}/countries/profiles", response_model=ResourceResponse)
    def country_profiles(
        snapshot_id: str,
        method: str = Query(default="keywords"),
        allocation: str = Query(default="studied"),
    ):
        return envelope(
            snapshot_id, "countries/profiles", {"method": method, "allocation": allocation}
        )

    @app.get("/{snapshot_id}/countries/clusters", response_model=ResourceResponse)
    def country_clusters(
        snapshot_id: str,
        method: str = Query(default="keywords"),
        allocation: str = Query(default="studied"),
        k: Optional[int] = Query(default=None),
    ):
        params = {"method": method, "allocation": allocation}
        if k is not None:
            params["k"] = k
        return envelope(snapshot_id, "countries/clusters", params)

    @app.get("/{snapshot_id}/complementarity/{kind}", response_model=ResourceResponse)
    def complementarity(snapshot_id: str, kind: str, a: str = Query(...), b: str = Query(...)):
        if kind not in ("flows", "correlations", "modularity"):
            raise HTTPException(status_code=404, detail=f"unknown resource: {kind}")
        return envelope(snapshot_id, f"complementarity/{kind}", {"a": a, "b": b})

    return app
