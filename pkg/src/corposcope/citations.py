"""External semantic network mined from citation-neighborhood abstracts.

The corpus is surrounded by a depth-2 citation neighborhood. Abstracts
of neighborhood articles are mined for relevant n-grams (those whose
per-document occurrence distribution deviates most from uniform under
a chi-squared statistic), a co-occurrence network is built over them,
filtered on a (min edge weight, max degree) grid with Pareto selection
on (modularity, size), and each seed article is profiled by the
community content of its own neighborhood.
"""

import io
import csv
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from .classification import CITATIONS, Classification, uniform_row
from .community import louvain
from .corpus import CitationRecord, Corpus
from .keywords import KeywordEdgeStats, KeywordNode, SemanticNetwork, edge_statistics
from .textprep import clean_sentences, count_vocabulary, ngram_counts


@dataclass
class RelevanceConfig:
    """Extraction and filtering parameters for the citation network."""

    ngram_max: int = 3
    N_k: int = 50000
    theta_w: float = 2.0
    k_max: int = 100
    language: str = "en"

    def __post_init__(self):
        if self.ngram_max < 1:
            raise ValueError("ngram_max must be >= 1")
        if self.N_k < 1:
            raise ValueError("N_k must be >= 1")
        if self.theta_w <= 0:
            raise ValueError("theta_w must be positive")
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")


@dataclass
class RelevantKeyword:
    ngram: str
    relevance: float
    document_frequency: int


@dataclass
class KeywordExtraction:
    keywords: list[RelevantKeyword]
    document_count: int
    notice: Optional[str] = None


@dataclass
class Neighborhood:
    """Citation records partitioned by hop distance from the seed corpus."""

    by_depth: dict[int, list[CitationRecord]]
    hops: dict[str, int]
    abstracts: dict[str, str]
    adjacency: dict[str, set]
    missing_abstracts: list[tuple[str, str]] = field(default_factory=list)
    disconnected: list[tuple[str, str]] = field(default_factory=list)

    def depth_counts(self) -> dict[int, int]:
        return {d: len(records) for d, records in sorted(self.by_depth.items())}


def build_neighborhood(corpus: Corpus) -> Neighborhood:
    """Partition citation records by hop count from the seed articles.

    Depth is recomputed from the citation topology: an undirected BFS
    from the seed set assigns each article its hop count, and a record
    sits at the depth of its deeper endpoint. Records whose component
    contains no seed keep their declared depth and are flagged. Each
    record's abstract is attached to its deeper endpoint (the article
    the record pulled in); seed articles contribute their own.
    """
    if not corpus.citations:
        raise ValueError("neighborhood empty: corpus has no citation records")

    adjacency: dict[str, set] = {}
    for rec in corpus.citations:
        adjacency.setdefault(rec.citing_id, set()).add(rec.cited_id)
        adjacency.setdefault(rec.cited_id, set()).add(rec.citing_id)

    hops = {art_id: 0 for art_id in corpus.articles}
    queue = deque(art_id for art_id in corpus.articles if art_id in adjacency)
    while queue:
        node = queue.popleft()
        for other in adjacency.get(node, ()):
            if other not in hops:
                hops[other] = hops[node] + 1
                queue.append(other)

    abstracts = {
        art_id: article.abstract
        for art_id, article in corpus.articles.items()
        if article.abstract
    }
    by_depth: dict[int, list[CitationRecord]] = {}
    missing = []
    disconnected = []
    for rec in corpus.citations:
        h_citing = hops.get(rec.citing_id)
        h_cited = hops.get(rec.cited_id)
        if h_citing is None or h_cited is None:
            disconnected.append((rec.citing_id, rec.cited_id))
            depth = rec.depth
            owner = rec.citing_id
        else:
            depth = max(h_citing, h_cited)
            owner = rec.citing_id if h_citing >= h_cited else rec.cited_id
        by_depth.setdefault(depth, []).append(rec)
        if rec.abstract:
            abstracts.setdefault(owner, rec.abstract)
        else:
            missing.append((rec.citing_id, rec.cited_id))
    return Neighborhood(
        by_depth=by_depth,
        hops=hops,
        abstracts=abstracts,
        adjacency=adjacency,
        missing_abstracts=missing,
        disconnected=disconnected,
    )


def neighborhood_ids(neighborhood: Neighborhood, article_id: str, max_depth: int = 2) -> set:
    """Ids within ``max_depth`` undirected hops of one article, itself excluded."""
    seen = {article_id}
    frontier = [article_id]
    out = set()
    for _ in range(max_depth):
        nxt = []
        for node in frontier:
            for other in neighborhood.adjacency.get(node, ()):
                if other not in seen:
                    seen.add(other)
                    out.add(other)
                    nxt.append(other)
        frontier = nxt
    return out


def extract_relevant_keywords(abstracts, config: RelevanceConfig) -> KeywordExtraction:
    """Rank candidate n-grams by deviation from a uniform spread.

    For each candidate, the observed per-document occurrence counts are
    tested against the uniform expectation total/D over the D documents
    that kept at least one token after cleaning; the raw chi-squared
    statistic is the relevance. The top ``N_k`` survive, ties broken by
    higher document frequency then lexicographic order.
    """
    abstracts = list(abstracts)
    if not abstracts:
        raise ValueError("no abstracts to mine")
    per_doc: list[Counter] = []
    for text in abstracts:
        sentences = clean_sentences(text, config.language)
        counts = ngram_counts(sentences, config.ngram_max)
        if counts:
            per_doc.append(counts)
    n_docs = len(per_doc)
    if n_docs == 0:
        raise ValueError("no abstracts survived cleaning")

    totals: Counter = Counter()
    doc_freq: Counter = Counter()
    sq_sums: dict[str, float] = {}
    for counts in per_doc:
        for gram, c in counts.items():
            totals[gram] += c
            doc_freq[gram] += 1
            sq_sums[gram] = sq_sums.get(gram, 0.0) + float(c) * c

    keywords = []
    for gram, total in totals.items():
        expected = total / n_docs
        # sum over occupied docs of (O-E)^2/E, plus the empty docs' E each
        occupied = sq_sums[gram] / expected - 2.0 * total + doc_freq[gram] * expected
        relevance = max(0.0, occupied + (n_docs - doc_freq[gram]) * expected)
        keywords.append(RelevantKeyword(gram, relevance, doc_freq[gram]))

    keywords.sort(key=lambda kw: (-kw.relevance, -kw.document_frequency, kw.ngram))
    notice = None
    if len(keywords) < config.N_k:
        notice = f"only {len(keywords)} candidates for N_k={config.N_k}; kept all"
    return KeywordExtraction(
        keywords=keywords[: config.N_k], document_count=n_docs, notice=notice
    )


def build_cooccurrence_network(
    keywords, abstracts, config: RelevanceConfig
) -> SemanticNetwork:
    """Unfiltered co-occurrence network over relevant keywords.

    Edge weight counts the abstracts where both n-grams occur.
    """
    vocabulary = {kw.ngram for kw in keywords}
    doc_freq: Counter = Counter()
    edges: dict[tuple[str, str], KeywordEdgeStats] = {}
    for text in abstracts:
        sentences = clean_sentences(text, config.language)
        present = sorted(
            gram
            for gram, count in count_vocabulary(sentences, vocabulary, config.ngram_max).items()
            if count > 0
        )
        for gram in present:
            doc_freq[gram] += 1
        for pair in combinations(present, 2):
            stats = edges.get(pair)
            if stats is None:
                edges[pair] = KeywordEdgeStats(w_obs=1)
            else:
                stats.w_obs += 1
    nodes = {
        kw.ngram: KeywordNode(keyword=kw.ngram, frequency=doc_freq.get(kw.ngram, 0) or kw.document_frequency)
        for kw in keywords
    }
    for (a, b) in edges:
        nodes[a].degree += 1
        nodes[b].degree += 1
    return SemanticNetwork(nodes=nodes, edges=edges)


@dataclass
class GridPoint:
    theta_w: float
    k_max: int
    node_count: int
    edge_count: int
    modularity: Optional[float] = None

    def to_json(self) -> dict:
        return {
            "theta_w": self.theta_w,
            "k_max": self.k_max,
            "node_count": self.node_count,
            "edge_count": self.edge_count,
            "modularity": self.modularity,
        }


@dataclass
class CitationSemanticNetwork:
    network: SemanticNetwork
    theta_w: float
    k_max: int
    grid: list[GridPoint]
    pareto_front: list[GridPoint]


def _filtered_copy(network: SemanticNetwork, theta_w: float, k_max: int) -> SemanticNetwork:
    edges = {
        pair: KeywordEdgeStats(w_obs=stats.w_obs)
        for pair, stats in network.edges.items()
        if stats.w_obs >= theta_w
    }
    degree: Counter = Counter()
    for (a, b) in edges:
        degree[a] += 1
        degree[b] += 1
    # prune in descending-degree order, lexicographic tie-break
    while degree:
        victim = min(degree, key=lambda name: (-degree[name], name))
        if degree[victim] <= k_max:
            break
        for pair in [p for p in edges if victim in p]:
            a, b = pair
            other = b if a == victim else a
            del edges[pair]
            degree[other] -= 1
            if degree[other] == 0:
                del degree[other]
        del degree[victim]
    nodes = {
        name: KeywordNode(
            keyword=name,
            frequency=network.nodes[name].frequency,
            degree=degree[name],
        )
        for name in degree
    }
    return SemanticNetwork(nodes=nodes, edges=edges)


def filter_and_select(
    network: SemanticNetwork,
    grid,
    seed: int = 0,
    choose=None,
) -> CitationSemanticNetwork:
    """Scan the (theta_w, k_max) grid and pick a Pareto-optimal network.

    Each grid point drops light edges, prunes high-degree hubs, and is
    scored by (modularity, node count). The Pareto front maximizes
    both; the default pick maximizes modularity * log(1 + node count).
    ``choose=(theta_w, k_max)`` overrides the selection.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("empty filter grid")
    points = []
    filtered_nets = {}
    for theta_w, k_max in grid:
        filtered = _filtered_copy(network, theta_w, k_max)
        if not filtered.edges:
            points.append(GridPoint(theta_w, k_max, node_count=0, edge_count=0))
            continue
        edge_statistics(filtered)
        adjacency = {name: {} for name in filtered.nodes}
        for (a, b), stats in filtered.edges.items():
            adjacency[a][b] = stats.mw
            adjacency[b][a] = stats.mw
        membership, q = louvain(adjacency, seed=seed)
        filtered.communities = membership
        filtered.modularity = q
        filtered.seed = seed
        point = GridPoint(
            theta_w, k_max,
            node_count=len(filtered.nodes),
            edge_count=len(filtered.edges),
            modularity=q,
        )
        points.append(point)
        filtered_nets[(theta_w, k_max)] = filtered

    scored = [p for p in points if p.modularity is not None]
    if not scored:
        raise ValueError("every grid point yields an empty network")
    front = [
        p
        for p in scored
        if not any(
            (q.modularity >= p.modularity and q.node_count >= p.node_count)
            and (q.modularity > p.modularity or q.node_count > p.node_count)
            for q in scored
        )
    ]

    if choose is not None:
        matches = [p for p in points if (p.theta_w, p.k_max) == tuple(choose)]
        if not matches or matches[0].modularity is None:
            raise ValueError(f"chosen grid point {choose} is not usable")
        selected = matches[0]
    else:
        selected = max(
            front,
            key=lambda p: (p.modularity * math.log1p(p.node_count), p.modularity, p.node_count),
        )
    return CitationSemanticNetwork(
        network=filtered_nets[(selected.theta_w, selected.k_max)],
        theta_w=selected.theta_w,
        k_max=selected.k_max,
        grid=points,
        pareto_front=front,
    )


def _abstract_vocab_counts(neighborhood: Neighborhood, vocabulary, config: RelevanceConfig):
    cache = {}
    for art_id, text in neighborhood.abstracts.items():
        sentences = clean_sentences(text, config.language)
        cache[art_id] = count_vocabulary(sentences, vocabulary, config.ngram_max)
    return cache


def classify_articles_by_citation(
    corpus: Corpus,
    citation_network: CitationSemanticNetwork,
    config: RelevanceConfig,
    include_depth2: bool = True,
    neighborhood: Optional[Neighborhood] = None,
) -> Classification:
    """Share of each citation community in every article's neighborhood.

    Counts occurrences of in-network keywords over the abstracts within
    two hops of each seed article (one hop when ``include_depth2`` is
    off). Articles with no neighborhood, or whose neighborhood contains
    no relevant keyword, get a flagged uniform row.
    """
    network = citation_network.network
    if network.communities is None:
        raise ValueError("communities not detected on the citation network")
    if neighborhood is None:
        neighborhood = build_neighborhood(corpus)
    vocabulary = set(network.nodes)
    counts_by_article = _abstract_vocab_counts(neighborhood, vocabulary, config)
    n_com = max(network.communities.values()) + 1
    categories = [str(c) for c in range(n_com)]
    ids = sorted(corpus.articles)
    rows = np.zeros((len(ids), n_com))
    flagged = set()
    max_depth = 2 if include_depth2 else 1
    for r, art_id in enumerate(ids):
        neighbors = neighborhood_ids(neighborhood, art_id, max_depth=max_depth)
        if not neighbors:
            rows[r] = uniform_row(n_com)
            flagged.add(art_id)
            continue
        com_counts = np.zeros(n_com)
        for other in neighbors:
            for gram, count in counts_by_article.get(other, {}).items():
                com_counts[network.communities[gram]] += count
        total = com_counts.sum()
        if total == 0:
            rows[r] = uniform_row(n_com)
            flagged.add(art_id)
        else:
            rows[r] = com_counts / total
    return Classification(
        method=CITATIONS, article_ids=ids, categories=categories, shares=rows, flagged=flagged
    )


def article_wordclouds(
    corpus: Corpus,
    citation_network: CitationSemanticNetwork,
    config: RelevanceConfig,
    include_depth2: bool = True,
    neighborhood: Optional[Neighborhood] = None,
) -> dict[str, dict]:
    """Per-article keyword counts (with communities) over neighborhoods."""
    network = citation_network.network
    if neighborhood is None:
        neighborhood = build_neighborhood(corpus)
    vocabulary = set(network.nodes)
    counts_by_article = _abstract_vocab_counts(neighborhood, vocabulary, config)
    communities = network.communities or {}
    out = {}
    for article_id in sorted(corpus.articles):
        neighbors = neighborhood_ids(
            neighborhood, article_id, max_depth=2 if include_depth2 else 1
        )
        totals: Counter = Counter()
        for other in neighbors:
            totals.update(counts_by_article.get(other, {}))
        words = [
            {"ngram": gram, "count": count, "community": communities.get(gram)}
            for gram, count in sorted(totals.items(), key=lambda item: (-item[1], item[0]))
        ]
        out[article_id] = {"article_id": article_id, "words": words}
    return out


def relevant_keywords_csv(
    extraction: KeywordExtraction, communities: Optional[dict] = None
) -> str:
    """CSV export: ngram,relevance,document_frequency,community."""
    communities = communities or {}
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["ngram", "relevance", "document_frequency", "community"])
    for kw in extraction.keywords:
        com = communities.get(kw.ngram)
        writer.writerow(
            [kw.ngram, repr(kw.relevance), kw.document_frequency, "" if com is None else com]
        )
    return buf.getvalue()
