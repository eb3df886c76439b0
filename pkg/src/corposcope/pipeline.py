"""Full analysis runs, immutable snapshots, and snapshot queries.

A run executes every analysis the corpus supports and freezes the
results as JSON exports under a content-addressed snapshot directory.
Cheap derived views (semantic fields, dendrogram re-cuts, evolution at
a new threshold) are computed on demand from the stored exports, never
by re-running the pipeline.
"""

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np
from filelock import FileLock

from . import citations as cit
from . import compare
from . import geo
from . import keywords as kw
from . import topics as tp
from .classification import CITATIONS, KEYWORDS, TOPICS, Classification
from .config import AnalysisConfig
from .corpus import Corpus, corpus_digest, corpus_stats, geo_flow_matrix


class PipelineError(RuntimeError):
    """A module failed mid-run; carries the log of completed exports."""

    def __init__(self, stage: str, error: Exception, completed: list[str]):
        super().__init__(f"{stage}: {error}")
        self.stage = stage
        self.completed = completed


@dataclass
class AnalysisSnapshot:
    snapshot_id: str
    config: AnalysisConfig
    corpus_digest: str
    created_at: str
    skipped: dict[str, str]
    exports: dict[str, object]  # filename -> JSON document (or CSV string)
    warnings: list[str] = field(default_factory=list)

    def meta(self) -> dict:
        return {
            "snapshot_id": self.snapshot_id,
            "config": self.config.to_json(),
            "corpus_digest": self.corpus_digest,
            "created_at": self.created_at,
            "skipped": self.skipped,
            "exports": sorted(self.exports),
            "warnings": self.warnings,
        }


def snapshot_id_for(config: AnalysisConfig, digest: str) -> str:
    h = hashlib.sha256()
    h.update(config.canonical().encode("utf-8"))
    h.update(digest.encode("utf-8"))
    return h.hexdigest()[:16]


def _topic_language(corpus: Corpus, configured: Optional[str]) -> Optional[str]:
    if configured:
        return configured
    langs = Counter(
        a.language for a in corpus.articles.values() if a.fulltext_ref
    )
    if not langs:
        return None
    # most common language; ties broken alphabetically
    return min(langs, key=lambda l: (-langs[l], l))


def run_pipeline(corpus: Corpus, config: AnalysisConfig, fulltext_base=".") -> AnalysisSnapshot:
    """Execute every supported analysis and assemble the snapshot.

    Analyses whose inputs are missing (no citations, no full texts,
    too few profiles) are marked skipped; genuine module errors abort
    the run.
    """
    exports: dict[str, object] = {}
    skipped: dict[str, str] = {}
    completed: list[str] = []
    seed = config.seed

    def stage(name, fn):
        try:
            result = fn()
        except Exception as err:  # noqa: BLE001 - wrapped with stage context
            raise PipelineError(name, err, completed) from err
        completed.append(name)
        return result

    def put(filename, payload):
        exports[filename] = payload
        completed.append(filename)

    put("corpus_stats.json", stage("corpus-stats", lambda: corpus_stats(corpus).to_json()))
    put("geo_flows.json", stage("geo-flows", lambda: geo_flow_matrix(corpus).to_json()))

    classifications: dict[str, Classification] = {}

    # --- internal semantic network (declared keywords)
    if any(len(set(a.keywords)) >= 2 for a in corpus.articles.values()):
        def keywords_stage():
            network = kw.project_keyword_network(corpus)
            kw.edge_statistics(network)
            kw.detect_communities(network, seed=seed)
            return network

        network = stage("keyword-network", keywords_stage)
        put("network_keywords.json", network.to_json())
        cls = stage(
            "keyword-classification", lambda: kw.classify_articles_by_keywords(corpus, network)
        )
        classifications[KEYWORDS] = cls
        put("classification_keywords.json", cls.to_json())
    else:
        skipped["networks/keywords"] = "no article declares two or more keywords"

    # --- external semantic network (citation neighborhood abstracts)
    rel_cfg = cit.RelevanceConfig(
        ngram_max=config.citations.ngram_max,
        N_k=config.citations.N_k,
        language=config.citations.language,
    )
    if not corpus.citations:
        skipped["networks/citations"] = "corpus has no citation records"
    else:
        neighborhood = stage("citation-neighborhood", lambda: cit.build_neighborhood(corpus))
        abstracts = [neighborhood.abstracts[k] for k in sorted(neighborhood.abstracts)]
        if not abstracts:
            skipped["networks/citations"] = "citation records carry no abstracts"
        else:
            def citation_stage():
                extraction = cit.extract_relevant_keywords(abstracts, rel_cfg)
                net = cit.build_cooccurrence_network(extraction.keywords, abstracts, rel_cfg)
                grid = [tuple(point) for point in config.citations.grid]
                choose = tuple(config.citations.choose) if config.citations.choose else None
                selected = cit.filter_and_select(net, grid, seed=seed, choose=choose)
                return extraction, selected

            extraction, selected = stage("citation-network", citation_stage)
            put("network_citations.json", {
                "network": selected.network.to_json(),
                "theta_w": selected.theta_w,
                "k_max": selected.k_max,
                "grid": [p.to_json() for p in selected.grid],
                "pareto_front": [p.to_json() for p in selected.pareto_front],
                "extraction_notice": extraction.notice,
            })
            put("relevant_keywords.csv", cit.relevant_keywords_csv(
                extraction, selected.network.communities or {}
            ))
            cls = stage("citation-classification", lambda: cit.classify_articles_by_citation(
                corpus, selected, rel_cfg,
                include_depth2=config.citations.include_depth2,
                neighborhood=neighborhood,
            ))
            classifications[CITATIONS] = cls
            put("classification_citations.json", cls.to_json())
            clouds = stage("wordclouds", lambda: cit.article_wordclouds(
                corpus, selected, rel_cfg,
                include_depth2=config.citations.include_depth2,
                neighborhood=neighborhood,
            ))
            put("wordclouds.json", [clouds[k] for k in sorted(clouds)])

    # --- full-text topics
    language = _topic_language(corpus, config.topics.language)
    has_fulltext = any(
        a.fulltext_ref and a.language == language for a in corpus.articles.values()
    )
    if language is None or not has_fulltext:
        skipped["topics"] = "no article carries a full-text reference"
    else:
        def topics_stage():
            sub = Corpus(
                articles={
                    art_id: a for art_id, a in corpus.articles.items()
                    if a.language == language and a.fulltext_ref
                },
                citations=[],
                provenance=corpus.provenance,
            )
            streams = tp.load_fulltexts(sub, fulltext_base)
            keep_pos = ("noun", "verb") if config.topics.drop_determiners else tp.DEFAULT_KEEP_POS
            matrix = tp.preprocess(streams, language=language, keep_pos=keep_pos)
            selection = None
            chosen_k = config.topics.K
            if config.topics.candidates:
                selection = tp.select_topic_count(
                    matrix,
                    config.topics.candidates,
                    replications=config.topics.replications,
                    seed=seed,
                    iterations=config.topics.iterations,
                    burn_in=config.topics.burn_in,
                    thinning=config.topics.thinning,
                    alpha=config.topics.alpha,
                    eta=config.topics.eta,
                    heldout_fraction=config.topics.heldout_fraction,
                )
                chosen_k = selection.chosen_K
            params = tp.fit_lda(
                matrix,
                K=chosen_k,
                seed=seed,
                iterations=config.topics.iterations,
                burn_in=config.topics.burn_in,
                thinning=config.topics.thinning,
                alpha=config.topics.alpha,
                eta=config.topics.eta,
            )
            return matrix, params, selection

        matrix, params, selection = stage("topic-model", topics_stage)
        doc = tp.model_to_json(params, top_m=config.topics.top_words, selection=selection)
        doc["language"] = language
        doc["doc_years"] = {
            doc_id: corpus.articles[doc_id].year for doc_id in params.doc_ids
        }
        doc["excluded_documents"] = matrix.excluded
        put("topics.json", doc)
        evolution = stage("topic-evolution", lambda: tp.topic_evolution(
            params, corpus, threshold=config.topics.evolution_threshold
        ))
        put("topics_evolution.json", evolution.to_json())
        cls = Classification(
            method=TOPICS,
            article_ids=list(params.doc_ids),
            categories=[str(k) for k in range(params.K)],
            shares=params.theta,
        )
        classifications[TOPICS] = cls
        put("classification_topics.json", cls.to_json())

    # --- country profiles and clusterings
    for method, cls in sorted(classifications.items()):
        for allocation in geo.ALLOCATIONS:
            key = f"countries/clusters:{method}:{allocation}"
            profiles = stage(
                f"profiles-{method}-{allocation}",
                lambda c=cls, a=allocation: geo.country_profiles(c, corpus, a),
            )
            if not profiles:
                skipped[key] = f"no {allocation} country tags among classified articles"
                continue
            put(f"profiles_{method}_{allocation}.json", {
                "method": method,
                "allocation": allocation,
                "profiles": [
                    {
                        "country": p.country,
                        "shares": [float(v) for v in p.shares],
                        "article_count": p.article_count,
                    }
                    for p in profiles
                ],
            })
            if len(profiles) < config.geo.k:
                skipped[key] = (
                    f"only {len(profiles)} profiles for k={config.geo.k}"
                )
                continue
            clustering = stage(
                f"clusters-{method}-{allocation}",
                lambda p=profiles: geo.cluster_countries(p, k=config.geo.k),
            )
            put(f"clusters_{method}_{allocation}.json", clustering.to_json())

    # --- complementarity of methods
    methods = sorted(classifications)
    if len(methods) < 2:
        skipped["complementarity"] = "fewer than two classifications available"
    for i, method_a in enumerate(methods):
        for method_b in methods[i + 1:]:
            pair = f"{method_a}-{method_b}"
            a, b = classifications[method_a], classifications[method_b]

            def comparison_stage(a=a, b=b):
                fm = compare.flow_matrix(a, b)
                report = compare.correlation_report(
                    a, b,
                    b_reps=config.compare.bootstrap_reps,
                    seed=seed,
                    shuffle_fraction=config.compare.shuffle_fraction,
                )
                curve_ab = compare.modularity_curve(a, b, thresholds=config.compare.thresholds)
                curve_ba = compare.modularity_curve(b, a, thresholds=config.compare.thresholds)
                return fm, report, curve_ab, curve_ba

            fm, report, curve_ab, curve_ba = stage(f"complementarity-{pair}", comparison_stage)
            flow_doc = fm.to_json()
            flow_doc["sankey"] = fm.to_sankey()
            put(f"comp_flows_{method_a}_{method_b}.json", flow_doc)
            put(f"comp_correlations_{method_a}_{method_b}.json", report.to_json())
            put(f"comp_correlations_{method_a}_{method_b}.csv", report.rho_csv())
            put(f"comp_modularity_{method_a}_{method_b}.json", curve_ab.to_json())
            put(f"comp_modularity_{method_b}_{method_a}.json", curve_ba.to_json())

    digest = corpus_digest(corpus)
    return AnalysisSnapshot(
        snapshot_id=snapshot_id_for(config, digest),
        config=config,
        corpus_digest=digest,
        created_at=datetime.now(timezone.utc).isoformat(),
        skipped=skipped,
        exports=exports,
        warnings=list(corpus.provenance.warnings),
    )


# ---------------------------------------------------------------------------
# persistence

def _dump_json(payload) -> str:
    return json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=1) + "\n"


class SnapshotStore:
    """Append-only snapshot directory tree under a workspace."""

    def __init__(self, workspace):
        self.root = Path(workspace)
        self.snapshots_dir = self.root / "snapshots"

    def lock(self) -> FileLock:
        self.root.mkdir(parents=True, exist_ok=True)
        return FileLock(str(self.root / ".lock"))

    def save(self, snapshot: AnalysisSnapshot) -> Path:
        """Persist a snapshot; an existing one with the same id is kept."""
        target = self.snapshots_dir / snapshot.snapshot_id
        if target.exists():
            return target
        with self.lock():
            exports_dir = target / "exports"
            exports_dir.mkdir(parents=True)
            for filename, payload in snapshot.exports.items():
                if filename.endswith(".csv"):
                    (exports_dir / filename).write_text(payload, encoding="utf-8")
                else:
                    (exports_dir / filename).write_text(_dump_json(payload), encoding="utf-8")
            (target / "snapshot.json").write_text(_dump_json(snapshot.meta()), encoding="utf-8")
        return target

    def list(self) -> list[dict]:
        if not self.snapshots_dir.exists():
            return []
        out = []
        for path in sorted(self.snapshots_dir.iterdir()):
            meta_path = path / "snapshot.json"
            if meta_path.exists():
                meta = json.loads(meta_path.read_text(encoding="utf-8"))
                out.append(
                    {
                        "snapshot_id": meta["snapshot_id"],
                        "created_at": meta["created_at"],
                        "corpus_digest": meta["corpus_digest"],
                        "skipped": meta["skipped"],
                    }
                )
        return sorted(out, key=lambda m: m["created_at"])

    def meta(self, snapshot_id: str) -> dict:
        path = self.snapshots_dir / snapshot_id / "snapshot.json"
        if not path.exists():
            raise UnknownSnapshot(snapshot_id)
        return json.loads(path.read_text(encoding="utf-8"))

    def read_export(self, snapshot_id: str, filename: str):
        path = self.snapshots_dir / snapshot_id / "exports" / filename
        if not path.exists():
            raise UnknownResource(filename)
        if filename.endswith(".csv"):
            return path.read_text(encoding="utf-8")
        return json.loads(path.read_text(encoding="utf-8"))


class UnknownSnapshot(KeyError):
    pass


class UnknownResource(KeyError):
    pass


class NotComputed(Exception):
    def __init__(self, resource: str, reason: str):
        super().__init__(f"{resource}: not computed: {reason}")
        self.resource = resource
        self.reason = reason


def _evolution_from_export(topics_doc: dict, threshold: float) -> dict:
    doc_ids = sorted(topics_doc["theta"])
    theta = np.array([topics_doc["theta"][d] for d in doc_ids])
    years_by_doc = [topics_doc["doc_years"][d] for d in doc_ids]
    years = sorted(set(years_by_doc))
    index = {y: i for i, y in enumerate(years)}
    counts = np.zeros((len(years), theta.shape[1]), dtype=int)
    addressed = theta >= threshold
    for d, year in enumerate(years_by_doc):
        counts[index[year]] += addressed[d]
    return {"threshold": threshold, "years": years, "counts": counts.tolist()}


def query_snapshot(store: SnapshotStore, snapshot_id: str, resource: str, params: dict = None):
    """Resolve a resource path against a stored snapshot.

    Static resources map to export files; semantic fields, dendrogram
    re-cuts and evolution thresholds are derived on the fly. Raises
    UnknownSnapshot / UnknownResource / NotComputed accordingly.
    """
    params = params or {}
    meta = store.meta(snapshot_id)
    parts = [p for p in resource.strip("/").split("/") if p]

    def guarded_read(filename, skip_key):
        try:
            return store.read_export(snapshot_id, filename)
        except UnknownResource:
            for key, reason in meta["skipped"].items():
                if key == skip_key or key.startswith(skip_key + ":"):
                    raise NotComputed(resource, reason) from None
            raise

    match parts:
        case ["corpus", "stats"]:
            return store.read_export(snapshot_id, "corpus_stats.json")
        case ["geo", "flows"]:
            return store.read_export(snapshot_id, "geo_flows.json")
        case ["networks", "keywords"]:
            return guarded_read("network_keywords.json", "networks/keywords")
        case ["networks", "keywords", "field", keyword]:
            doc = guarded_read("network_keywords.json", "networks/keywords")
            network = kw.network_from_json(doc)
            layout = kw.semantic_field(network, keyword)
            return {"center": layout.center, "points": layout.points, "notice": layout.notice}
        case ["networks", "citations"]:
            return guarded_read("network_citations.json", "networks/citations")
        case ["articles", article_id, "wordcloud"]:
            clouds = guarded_read("wordclouds.json", "networks/citations")
            for cloud in clouds:
                if cloud["article_id"] == article_id:
                    return cloud
            raise UnknownResource(resource)
        case ["topics"]:
            return guarded_read("topics.json", "topics")
        case ["topics", "evolution"]:
            doc = guarded_read("topics.json", "topics")
            threshold = float(params.get("threshold", meta["config"]["topics"]["evolution_threshold"]))
            return _evolution_from_export(doc, threshold)
        case ["countries", "profiles"]:
            method = params.get("method", KEYWORDS)
            allocation = params.get("allocation", geo.STUDIED)
            skip_key = f"countries/clusters:{method}:{allocation}"
            return guarded_read(f"profiles_{method}_{allocation}.json", skip_key)
        case ["countries", "clusters"]:
            method = params.get("method", KEYWORDS)
            allocation = params.get("allocation", geo.STUDIED)
            skip_key = f"countries/clusters:{method}:{allocation}"
            clusters_doc = guarded_read(f"clusters_{method}_{allocation}.json", skip_key)
            k = params.get("k")
            if k is None or int(k) == clusters_doc["k"]:
                return clusters_doc
            profiles_doc = guarded_read(f"profiles_{method}_{allocation}.json", skip_key)
            clustering = geo.clustering_from_json(clusters_doc, profiles_doc)
            return geo.recut_clustering(clustering, int(k)).to_json()
        case ["complementarity", kind] if kind in ("flows", "correlations", "modularity"):
            method_a = params.get("a")
            method_b = params.get("b")
            if not method_a or not method_b:
                raise UnknownResource(f"{resource}: requires a= and b= parameters")
            filename = f"comp_{kind}_{method_a}_{method_b}.json"
            try:
                return store.read_export(snapshot_id, filename)
            except UnknownResource:
                if kind == "modularity":
                    # stored per ordered pair; nothing to transpose
                    raise _comp_not_computed(meta, resource, method_a, method_b) from None
            # flows/correlations are stored once per unordered pair
            swapped = f"comp_{kind}_{method_b}_{method_a}.json"
            try:
                doc = store.read_export(snapshot_id, swapped)
            except UnknownResource:
                raise _comp_not_computed(meta, resource, method_a, method_b) from None
            return _transpose_comparison(kind, doc)
    raise UnknownResource(resource)


def _comp_not_computed(meta, resource, method_a, method_b):
    if "complementarity" in meta["skipped"]:
        return NotComputed(resource, meta["skipped"]["complementarity"])
    available = {KEYWORDS, CITATIONS, TOPICS}
    missing = [m for m in (method_a, method_b) if f"classification_{m}.json" not in meta["exports"]]
    if missing and set(missing) <= available:
        return NotComputed(resource, f"no classification for: {', '.join(missing)}")
    return UnknownResource(resource)


def _transpose_comparison(kind: str, doc: dict) -> dict:
    if kind == "flows":
        flows = np.array(doc["flows"])
        out = {
            "method_a": doc["method_b"],
            "method_b": doc["method_a"],
            "categories_a": doc["categories_b"],
            "categories_b": doc["categories_a"],
            "flows": flows.T.tolist(),
            "article_count": doc["article_count"],
        }
        sankey = doc.get("sankey")
        if sankey:
            n_a = len(doc["categories_a"])
            n_b = len(doc["categories_b"])
            nodes = sankey["nodes"][n_a:] + sankey["nodes"][:n_a]
            links = [
                {
                    "source": link["target"] - n_a,
                    "target": link["source"] + n_b,
                    "value": link["value"],
                }
                for link in sankey["links"]
            ]
            out["sankey"] = {"nodes": nodes, "links": links}
        return out
    # correlations: transpose rho, swap the method labels
    rho = [list(row) for row in zip(*doc["rho"])] if doc["rho"] else []
    out = dict(doc)
    out.update({"method_a": doc["method_b"], "method_b": doc["method_a"], "rho": rho})
    return out
