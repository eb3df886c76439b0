"""Acceptance suite: one test per criterion, each printing a pass line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings. The dataset-conditional criterion runs only when the
original corpus is supplied via the CORPOSCOPE_ORIGINAL_DATA env var.
"""

import math
import os
import time
from contextlib import contextmanager
from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

DEMO = Path(__file__).resolve().parent.parent / "fixtures" / "demo"


@contextmanager
def criterion(name: str, budget_seconds: float):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < budget_seconds, f"{name}: {elapsed:.2f}s exceeds {budget_seconds}s"
    print(f"PASS {name} ({elapsed:.2f}s < {budget_seconds}s)")


def test_modal_weight_oracle(tmp_path):
    """w_e / mw match an independent formula transcription to 1e-12."""
    from corposcope.corpus import load_corpus
    from corposcope.keywords import edge_statistics, project_keyword_network
    from conftest import article_row, write_articles_csv
    import random

    with criterion("modal-weight oracle (20-keyword fixture)", 1.0):
        rng = random.Random(2024)
        vocab = [f"kw{i:02d}" for i in range(20)]
        rows = [
            article_row(f"a{i:03d}", keywords=rng.sample(vocab, rng.randint(2, 6)))
            for i in range(80)
        ]
        corpus = load_corpus(write_articles_csv(tmp_path / "a.csv", rows))
        net = edge_statistics(project_keyword_network(corpus))
        assert len(net.nodes) == 20

        # independent transcription of the probability-union formulas
        marginals = {}
        for (i, j), stats in net.edges.items():
            marginals[i] = marginals.get(i, 0.0) + stats.w_obs
            marginals[j] = marginals.get(j, 0.0) + stats.w_obs
        w = 2.0 * sum(s.w_obs for s in net.edges.values())
        for (i, j), stats in net.edges.items():
            w_i, w_j = marginals[i], marginals[j]
            p_fwd = w_i * w_j / (w * (w - w_i))
            p_bwd = w_i * w_j / (w * (w - w_j))
            w_e = w / 2.0 * (p_fwd + p_bwd - p_fwd * p_bwd)
            mw = stats.w_obs / math.sqrt(w_e)
            assert stats.w_e == pytest.approx(w_e, rel=1e-12)
            assert stats.mw == pytest.approx(mw, rel=1e-12)
            # symmetry: the unordered lookup must serve both orientations
            assert net.edge(i, j).mw == net.edge(j, i).mw


def test_louvain_planted_partition():
    """NMI > 0.9 against the planted partition in at least 9/10 seeds."""
    from sklearn.metrics import normalized_mutual_info_score

    from corposcope.community import louvain

    with criterion("Louvain planted partition (100 nodes, 10 seeds)", 10.0):
        rng = np.random.default_rng(4242)
        n, blocks = 100, 4
        planted = [i * blocks // n for i in range(n)]
        adjacency = {f"n{i:03d}": {} for i in range(n)}
        names = sorted(adjacency)
        for i, j in combinations(range(n), 2):
            p = 0.3 if planted[i] == planted[j] else 0.01
            if rng.random() < p:
                adjacency[names[i]][names[j]] = 1.0
                adjacency[names[j]][names[i]] = 1.0

        truth = [planted[int(name[1:])] for name in names]
        hits = 0
        for seed in range(10):
            membership, _ = louvain(adjacency, seed=seed)
            found = [membership[name] for name in names]
            if normalized_mutual_info_score(truth, found) > 0.9:
                hits += 1
        assert hits >= 9, f"only {hits}/10 seeds recovered the planted partition"


def test_tfidf_equivalence():
    """Matrix matches a two-pass oracle to 1e-12; df == N terms are zero."""
    from corposcope.topics import tfidf

    with criterion("tfidf two-pass oracle", 1.0):
        rng = np.random.default_rng(7)
        counts = rng.integers(0, 5, size=(40, 25))
        counts[:, 3] = np.maximum(counts[:, 3], 1)  # a term in every document
        weights = tfidf(counts)

        n_docs = counts.shape[0]
        oracle = np.zeros(counts.shape)
        for v in range(counts.shape[1]):
            df = int((counts[:, v] > 0).sum())
            if df == 0:
                continue
            for d in range(n_docs):
                oracle[d, v] = counts[d, v] * math.log(n_docs / df)
        assert np.allclose(weights, oracle, rtol=1e-12, atol=0)
        assert np.all(weights[:, 3] == 0.0)


def test_lda_recovery_and_selection():
    """fit_lda(K=3) purity >= 90%; selection over {2,3,5,8} picks 3."""
    from corposcope.topics import DocumentTermMatrix, fit_lda, select_topic_count

    with criterion("LDA planted recovery + K selection", 120.0):
        rng = np.random.default_rng(31)
        vocab_per_topic, n_docs, doc_len = 30, 300, 60
        vocab = [f"t{k}w{v:02d}" for k in range(3) for v in range(vocab_per_topic)]
        counts = np.zeros((n_docs, len(vocab)), dtype=np.int64)
        doc_topics = rng.integers(0, 3, n_docs)
        for d in range(n_docs):
            k = int(doc_topics[d])
            words = rng.integers(k * vocab_per_topic, (k + 1) * vocab_per_topic, doc_len)
            np.add.at(counts[d], words, 1)
        matrix = DocumentTermMatrix(
            doc_ids=[f"d{d:03d}" for d in range(n_docs)], vocabulary=vocab, counts=counts
        )

        params = fit_lda(
            matrix, K=3, seed=17, iterations=200, burn_in=80, thinning=10, alpha=0.5
        )
        hits = 0
        for topic in params.top_words(10):
            planted = [int(word[1]) for word, _ in topic]
            best = max(set(planted), key=planted.count)
            hits += planted.count(best)
        purity = hits / 30
        assert purity >= 0.9, f"top-word purity {purity:.2f} below 0.9"

        report = select_topic_count(
            matrix, [2, 3, 5, 8], replications=3, seed=5,
            iterations=120, burn_in=40, thinning=8, alpha=0.5,
        )
        assert report.chosen_K == 3, f"chose {report.chosen_K}: {report.perplexity}"


def test_flow_conservation():
    """Total flow mass equals the row count; transpose symmetry is exact."""
    from corposcope.classification import Classification
    from corposcope.compare import flow_matrix

    with criterion("flow conservation (737 x 10 vs 737 x 12)", 1.0):
        rng = np.random.default_rng(11)
        ids = [f"a{i}" for i in range(737)]

        def stochastic(m, seed):
            rows = np.random.default_rng(seed).random((737, m))
            return rows / rows.sum(axis=1, keepdims=True)

        a = Classification("keywords", ids, [str(i) for i in range(10)], stochastic(10, 1))
        b = Classification("topics", ids, [str(i) for i in range(12)], stochastic(12, 2))
        fm = flow_matrix(a, b)
        assert abs(fm.flows.sum() - 737) / 737 < 1e-6
        swapped = flow_matrix(b, a)
        assert np.array_equal(swapped.flows, fm.flows.T)


def test_null_model_calibration():
    """mean |rho_0| within 3 sd of the Monte-Carlo oracle; rho_+ above rho_0."""
    from corposcope.classification import Classification
    from corposcope.compare import correlation_report

    with criterion("null-model calibration (737 rows, b=1000)", 120.0):
        n = 737

        def stochastic(m, seed):
            rows = np.random.default_rng(seed).random((n, m))
            return rows / rows.sum(axis=1, keepdims=True)

        ids = [f"a{i}" for i in range(n)]
        mat_a = stochastic(10, 21)
        mat_b = stochastic(12, 22)
        a = Classification("keywords", ids, [str(i) for i in range(10)], mat_a)
        b = Classification("topics", ids, [str(i) for i in range(12)], mat_b)
        report = correlation_report(a, b, b_reps=1000, seed=3)

        # Monte-Carlo oracle: fresh independent matrices per replication
        rng = np.random.default_rng(1234)
        samples = []
        for _ in range(1000):
            x = rng.random((n, 10))
            x /= x.sum(axis=1, keepdims=True)
            y = rng.random((n, 12))
            y /= y.sum(axis=1, keepdims=True)
            cx = x - x.mean(axis=0)
            cy = y - y.mean(axis=0)
            rho = (cx.T @ cy) / n / np.outer(cx.std(axis=0), cy.std(axis=0))
            samples.append(float(np.abs(rho).mean()))
        oracle_mean = float(np.mean(samples))
        oracle_sd = float(np.std(samples))

        got = report.null_lower["mean_abs"]["mean"]
        assert abs(got - oracle_mean) <= 3 * oracle_sd, (
            f"mean |rho_0| = {got:.5f} vs oracle {oracle_mean:.5f} +/- {oracle_sd:.5f}"
        )
        # scale sanity: sqrt(2/pi)/sqrt(737) ~ 0.029
        assert 0.5 * 0.029 < got < 2 * 0.029
        # upper band strictly above the lower band on every aggregate
        for key in ("max", "mean_abs"):
            assert report.null_upper[key]["mean"] > report.null_lower[key]["mean"], key


def test_ward_properties():
    """Inertia share monotone in k; zero-height twin merge; k = n exact 1.0."""
    from corposcope.geo import CountryProfile, cluster_countries, recut_clustering

    with criterion("Ward clustering properties (50 profiles)", 5.0):
        rng = np.random.default_rng(55)
        shares = rng.dirichlet(np.ones(6), size=50)
        codes = [f"{chr(65 + i // 26)}{chr(65 + i % 26)}" for i in range(50)]
        profiles = [
            CountryProfile(codes[i], "studied", "keywords", shares[i], 1)
            for i in range(50)
        ]
        base = cluster_countries(profiles, k=1)
        inertia = [recut_clustering(base, k).inertia_share for k in range(1, 51)]
        assert all(b >= a - 1e-12 for a, b in zip(inertia, inertia[1:]))
        assert recut_clustering(base, 50).inertia_share == 1.0

        twins = profiles[:10]
        twins[1] = CountryProfile(
            twins[1].country, "studied", "keywords", twins[0].shares.copy(), 1
        )
        clustering = cluster_countries(twins, k=5)
        assert clustering.dendrogram[0]["height"] == pytest.approx(0.0, abs=1e-12)


def test_multiclass_modularity():
    """Self-comparison ratio 1.0 +/- 1e-9; planted blocks match the oracle."""
    from corposcope.classification import Classification
    from corposcope.compare import modularity_curve

    with criterion("multi-class modularity (self + planted blocks)", 10.0):
        rng = np.random.default_rng(77)
        n = 30
        ids = [f"a{i}" for i in range(n)]
        base = np.zeros((n, 2))
        base[: n // 2, 0] = 1.0
        base[n // 2:, 1] = 1.0
        rows_b = base + rng.random((n, 2)) * 0.05
        rows_b /= rows_b.sum(axis=1, keepdims=True)
        rows_a = rng.dirichlet(np.ones(3), size=n)
        a = Classification("keywords", ids, ["0", "1", "2"], rows_a)
        b = Classification("topics", ids, ["0", "1"], rows_b)

        thresholds = [0.1, 0.4, 0.9]
        self_curve = modularity_curve(b, b, thresholds=thresholds)
        assert any(v is not None for v in self_curve.relative_modularity)
        for value in self_curve.relative_modularity:
            if value is not None:
                assert abs(value - 1.0) <= 1e-9

        curve = modularity_curve(a, b, thresholds=thresholds)
        dist = np.sqrt(((rows_b[:, None] - rows_b[None, :]) ** 2).sum(axis=2))
        for ti, theta in enumerate(thresholds):
            adjacency = (dist < theta).astype(float)
            np.fill_diagonal(adjacency, 0.0)
            if adjacency.sum() == 0:
                assert curve.relative_modularity[ti] is None
                continue
            k = adjacency.sum(axis=1)
            m2 = k.sum()

            def oracle_q(memberships):
                q = 0.0
                for c in range(memberships.shape[1]):
                    for i in range(n):
                        for j in range(n):
                            q += (
                                (adjacency[i, j] - k[i] * k[j] / m2)
                                * memberships[i, c] * memberships[j, c]
                            )
                return q / m2

            q_a, q_b = oracle_q(rows_a), oracle_q(rows_b)
            if q_b <= 0:
                assert curve.relative_modularity[ti] is None
            else:
                assert curve.relative_modularity[ti] == pytest.approx(q_a / q_b, abs=1e-9)


def test_pipeline_determinism(tmp_path):
    """Identical corpus/config/seed: same snapshot id, byte-identical exports."""
    from corposcope.config import AnalysisConfig
    from corposcope.corpus import load_corpus
    from corposcope.pipeline import SnapshotStore, run_pipeline

    with criterion("pipeline determinism (demo corpus, two runs)", 60.0):
        corpus = load_corpus(DEMO / "articles.csv", DEMO / "citations.csv")
        config = AnalysisConfig.from_file(DEMO / "config.json")
        first = run_pipeline(corpus, config, fulltext_base=DEMO)
        second = run_pipeline(
            load_corpus(DEMO / "articles.csv", DEMO / "citations.csv"),
            AnalysisConfig.from_file(DEMO / "config.json"),
            fulltext_base=DEMO,
        )
        assert first.snapshot_id == second.snapshot_id

        dir_a = SnapshotStore(tmp_path / "a").save(first)
        dir_b = SnapshotStore(tmp_path / "b").save(second)
        names_a = sorted(p.name for p in (dir_a / "exports").iterdir())
        names_b = sorted(p.name for p in (dir_b / "exports").iterdir())
        assert names_a == names_b
        for name in names_a:
            bytes_a = (dir_a / "exports" / name).read_bytes()
            bytes_b = (dir_b / "exports" / name).read_bytes()
            assert bytes_a == bytes_b, f"{name} differs between runs"


ORIGINAL_DATA = os.environ.get("CORPOSCOPE_ORIGINAL_DATA")


@pytest.mark.skipif(
    not ORIGINAL_DATA,
    reason="original corpus not supplied (set CORPOSCOPE_ORIGINAL_DATA to its directory)",
)
def test_original_corpus_headline_numbers():
    """Dataset-conditional: headline counts and aggregates of the source corpus."""
    from corposcope.classification import Classification
    from corposcope.compare import correlation_report
    from corposcope.config import AnalysisConfig
    from corposcope.corpus import corpus_stats, load_corpus
    from corposcope.geo import cluster_countries, country_profiles
    from corposcope.keywords import detect_communities, edge_statistics, project_keyword_network
    from corposcope.pipeline import run_pipeline

    root = Path(ORIGINAL_DATA)
    corpus = load_corpus(root / "articles.csv", root / "citations.csv")
    stats = corpus_stats(corpus)
    assert stats.article_count == 737
    assert stats.authoring_country_count == 51
    assert stats.citations_received == 2710

    communities = []
    for seed in range(3):
        net = detect_communities(
            edge_statistics(project_keyword_network(corpus)), seed=seed
        )
        communities.append(max(net.communities.values()) + 1)
    assert all(abs(c - 10) <= 1 for c in communities), communities

    config_path = root / "config.json"
    config = AnalysisConfig.from_file(config_path) if config_path.exists() else AnalysisConfig()
    snapshot = run_pipeline(corpus, config, fulltext_base=root)

    citation_doc = snapshot.exports.get("network_citations.json")
    assert citation_doc is not None
    n_com = len({n["community"] for n in citation_doc["network"]["nodes"]})
    assert abs(n_com - 12) <= 1

    topics_doc = snapshot.exports.get("topics.json")
    assert topics_doc is not None and topics_doc["K"] == 20

    expected_inertia = {"keywords": 0.163, "citations": 0.164, "topics": 0.134}
    for method, expected in expected_inertia.items():
        doc = snapshot.exports.get(f"clusters_{method}_studied.json")
        assert doc is not None and doc["k"] == 4
        assert abs(doc["inertia_share"] - expected) <= 0.01

    kw = Classification.from_json(snapshot.exports["classification_keywords.json"])
    tp = Classification.from_json(snapshot.exports["classification_topics.json"])
    report = correlation_report(kw, tp, b_reps=10000, seed=config.seed)
    assert abs(report.max_rho - 0.51) <= 0.05
    assert abs(report.mean_abs_rho - 0.091) <= 0.01
    # neither equivalent nor orthogonal: observed max sits between the bands
    assert report.null_lower["max"]["mean"] < report.max_rho < report.null_upper["max"]["mean"]
