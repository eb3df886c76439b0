"""Internal semantic network built from author-declared keywords.

Keywords become nodes; two keywords are linked when at least one
article declares both. Edge strength is measured by the modal weight,
the ratio of the observed co-occurrence count to the square root of
its degree-expected value, which then drives community detection and
the radial semantic-field layout.
"""

import difflib
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from .classification import KEYWORDS, Classification, uniform_row
from .community import louvain
from .corpus import Corpus


class ProjectionError(ValueError):
    pass


class UnknownKeywordError(KeyError):
    def __init__(self, keyword: str, suggestions: list[str]):
        super().__init__(f"unknown keyword {keyword!r}; closest matches: {suggestions}")
        self.keyword = keyword
        self.suggestions = suggestions


@dataclass
class KeywordNode:
    keyword: str
    frequency: int  # number of articles declaring the keyword
    degree: int = 0


@dataclass
class KeywordEdgeStats:
    """Per-edge co-occurrence statistics.

    ``w_obs`` is the number of articles declaring both endpoints.
    ``w_i``/``w_j`` are the marginal weight sums (weighted degrees) of
    the endpoints and ``w_total`` the total network weight counting
    both endpoints of every edge. ``w_e`` and ``mw`` stay None until
    :func:`edge_statistics` fills them; ``degenerate`` marks edges
    where the expected weight is undefined.
    """

    w_obs: int
    w_i: float = 0.0
    w_j: float = 0.0
    w_total: float = 0.0
    w_e: Optional[float] = None
    mw: Optional[float] = None
    degenerate: bool = False


@dataclass
class SemanticNetwork:
    nodes: dict[str, KeywordNode]
    edges: dict[tuple[str, str], KeywordEdgeStats]  # keyed by sorted keyword pair
    communities: Optional[dict[str, int]] = None
    modularity: Optional[float] = None
    seed: Optional[int] = None

    def edge(self, a: str, b: str) -> KeywordEdgeStats:
        return self.edges[(a, b) if a <= b else (b, a)]

    def neighbors(self, keyword: str) -> list[str]:
        out = []
        for (a, b) in self.edges:
            if a == keyword:
                out.append(b)
            elif b == keyword:
                out.append(a)
        return sorted(out)

    def to_json(self) -> dict:
        coms = self.communities or {}
        return {
            "nodes": [
                {
                    "keyword": n.keyword,
                    "frequency": n.frequency,
                    "degree": n.degree,
                    "community": coms.get(n.keyword),
                }
                for n in sorted(self.nodes.values(), key=lambda n: n.keyword)
            ],
            "edges": [
                {
                    "source": a,
                    "target": b,
                    "w_obs": stats.w_obs,
                    "w_e": stats.w_e,
                    "mw": stats.mw,
                }
                for (a, b), stats in sorted(self.edges.items())
            ],
            "modularity": self.modularity,
        }


def network_from_json(doc: dict) -> SemanticNetwork:
    """Rebuild a semantic network from its JSON export."""
    nodes = {}
    communities = {}
    any_community = False
    for raw in doc["nodes"]:
        nodes[raw["keyword"]] = KeywordNode(
            keyword=raw["keyword"], frequency=raw["frequency"], degree=raw["degree"]
        )
        if raw.get("community") is not None:
            communities[raw["keyword"]] = raw["community"]
            any_community = True
    edges = {}
    for raw in doc["edges"]:
        a, b = sorted((raw["source"], raw["target"]))
        edges[(a, b)] = KeywordEdgeStats(
            w_obs=raw["w_obs"],
            w_e=raw.get("w_e"),
            mw=raw.get("mw"),
            degenerate=raw.get("w_e") is None,
        )
    return SemanticNetwork(
        nodes=nodes,
        edges=edges,
        communities=communities if any_community else None,
        modularity=doc.get("modularity"),
    )


def project_keyword_network(corpus: Corpus) -> SemanticNetwork:
    """Project the article-keyword bipartite graph onto keywords.

    Edge (i, j) exists iff at least one article declares both i and j;
    its observed weight counts such articles. Keywords only used alone
    become isolated nodes.
    """
    nodes: dict[str, KeywordNode] = {}
    edges: dict[tuple[str, str], KeywordEdgeStats] = {}
    any_pair = False
    for article in corpus.articles.values():
        kws = sorted(set(article.keywords))
        for kw in kws:
            node = nodes.get(kw)
            if node is None:
                nodes[kw] = KeywordNode(keyword=kw, frequency=1)
            else:
                node.frequency += 1
        for a, b in combinations(kws, 2):
            any_pair = True
            stats = edges.get((a, b))
            if stats is None:
                edges[(a, b)] = KeywordEdgeStats(w_obs=1)
            else:
                stats.w_obs += 1
    if not any_pair:
        raise ProjectionError("projection is empty: no article declares two or more keywords")
    for (a, b) in edges:
        nodes[a].degree += 1
        nodes[b].degree += 1
    return SemanticNetwork(nodes=nodes, edges=edges)


def edge_statistics(network: SemanticNetwork) -> SemanticNetwork:
    """Fill expected weights and modal weights on every edge.

    The link probability in each direction is the cross-product of the
    endpoint marginal sums over the total weight, the two directions
    are combined by probabilistic union, and the expected weight is
    that union times half the total weight. The modal weight is the
    observed weight over the square root of the expected weight.
    """
    marginal = {kw: 0.0 for kw in network.nodes}
    for (a, b), stats in network.edges.items():
        marginal[a] += stats.w_obs
        marginal[b] += stats.w_obs
    w_total = sum(stats.w_obs for stats in network.edges.values()) * 2.0

    for (a, b), stats in network.edges.items():
        w_i = marginal[a]
        w_j = marginal[b]
        stats.w_i = w_i
        stats.w_j = w_j
        stats.w_total = w_total
        if w_total - w_i <= 0 or w_total - w_j <= 0:
            stats.degenerate = True
            stats.w_e = None
            stats.mw = None
            continue
        p_ij = (w_i * w_j) / (w_total * (w_total - w_i))
        p_ji = (w_i * w_j) / (w_total * (w_total - w_j))
        p_union = p_ij + p_ji - p_ij * p_ji
        w_e = (w_total / 2.0) * p_union
        stats.w_e = w_e
        stats.mw = stats.w_obs / math.sqrt(w_e)
    return network


def detect_communities(network: SemanticNetwork, seed: int) -> SemanticNetwork:
    """Louvain over modal-weighted edges; fills communities + modularity.

    Node iteration order is lexicographic, so equal seeds give
    bit-identical partitions. Isolated keywords keep singleton
    communities.
    """
    if not network.nodes:
        raise ValueError("empty network")
    adjacency = {kw: {} for kw in network.nodes}
    for (a, b), stats in network.edges.items():
        if stats.mw is None:
            continue
        adjacency[a][b] = stats.mw
        adjacency[b][a] = stats.mw
    membership, q = louvain(adjacency, seed=seed)
    network.communities = membership
    network.modularity = q
    network.seed = seed
    return network


@dataclass
class SemanticField:
    """Radial layout of a keyword's neighborhood.

    Each neighbor sits at distance ``1/mw`` from the center; the unit
    circle marks modal weight 1. Neighbors are grouped by community
    into contiguous angular sectors sized by group share.
    """

    center: str
    points: list[dict] = field(default_factory=list)  # sorted by distance ascending
    notice: Optional[str] = None

    def to_json(self) -> list[dict]:
        return self.points


def semantic_field(network: SemanticNetwork, center: str) -> SemanticField:
    if center not in network.nodes:
        suggestions = difflib.get_close_matches(center, sorted(network.nodes), n=5, cutoff=0.0)
        raise UnknownKeywordError(center, suggestions)
    coms = network.communities or {}
    neighbors = []
    for other in network.neighbors(center):
        stats = network.edge(center, other)
        if stats.mw is None:
            continue
        neighbors.append((other, 1.0 / stats.mw, coms.get(other, 0)))
    if not neighbors:
        return SemanticField(center=center, notice=f"keyword {center!r} has no linked neighbors")

    by_community: dict[int, list] = {}
    for name, dist, com in neighbors:
        by_community.setdefault(com, []).append((dist, name))
    total = len(neighbors)
    points = []
    start = 0.0
    for com in sorted(by_community):
        group = sorted(by_community[com])
        width = 2.0 * math.pi * len(group) / total
        step = width / len(group)
        for idx, (dist, name) in enumerate(group):
            points.append(
                {
                    "keyword": name,
                    "distance": dist,
                    "angle_radians": start + (idx + 0.5) * step,
                    "community": com,
                }
            )
        start += width
    points.sort(key=lambda p: (p["distance"], p["keyword"]))
    return SemanticField(center=center, points=points)


def classify_articles_by_keywords(corpus: Corpus, network: SemanticNetwork) -> Classification:
    """Per-article share of each keyword community.

    An article's row is the distribution of its declared keywords over
    communities; keyword-less articles get a flagged uniform row.
    """
    if network.communities is None:
        raise ValueError("communities not detected")
    n_com = max(network.communities.values()) + 1
    categories = [str(c) for c in range(n_com)]
    ids = sorted(corpus.articles)
    rows = np.zeros((len(ids), n_com))
    flagged = set()
    for r, art_id in enumerate(ids):
        counts = np.zeros(n_com)
        known = 0
        for kw in corpus.articles[art_id].keywords:
            com = network.communities.get(kw)
            if com is not None:
                counts[com] += 1
                known += 1
        if known == 0:
            rows[r] = uniform_row(n_com)
            flagged.add(art_id)
        else:
            rows[r] = counts / known
    return Classification(
        method=KEYWORDS, article_ids=ids, categories=categories, shares=rows, flagged=flagged
    )
