"""Country-level aggregation of classifications and Ward clustering.

A country's semantic profile under a method is the mean classification
row over the articles authored from (or studying) that country.
Profiles are clustered by ascending hierarchical clustering with Ward
linkage on Euclidean distances; any cluster count is a cheap cut of
the stored dendrogram.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.cluster.hierarchy import linkage

from .classification import Classification
from .corpus import Corpus

AUTHORING = "authoring"
STUDIED = "studied"
ALLOCATIONS = (AUTHORING, STUDIED)


@dataclass
class CountryProfile:
    country: str
    allocation: str
    method: str
    shares: np.ndarray
    article_count: int


def country_profiles(
    classification: Classification, corpus: Corpus, allocation: str
) -> list[CountryProfile]:
    """Mean classification row per country under one geographic allocation.

    An article tagged with several countries contributes its full row
    to each of them; flagged (unclassified) rows are skipped; countries
    with no qualifying article emit no profile.
    """
    if allocation not in ALLOCATIONS:
        raise ValueError(f"allocation must be one of {ALLOCATIONS}")
    sums: dict[str, np.ndarray] = {}
    counts: dict[str, int] = {}
    n_cat = len(classification.categories)
    for row_idx, art_id in enumerate(classification.article_ids):
        if art_id in classification.flagged:
            continue
        article = corpus.articles.get(art_id)
        if article is None:
            continue
        tags = (
            article.authoring_countries if allocation == AUTHORING else article.studied_countries
        )
        for country in tags:
            if country not in sums:
                sums[country] = np.zeros(n_cat)
                counts[country] = 0
            sums[country] += classification.shares[row_idx]
            counts[country] += 1
    return [
        CountryProfile(
            country=country,
            allocation=allocation,
            method=classification.method,
            shares=sums[country] / counts[country],
            article_count=counts[country],
        )
        for country in sorted(sums)
    ]


@dataclass
class CountryClustering:
    method: str
    allocation: str
    k: int
    assignment: dict[str, int]
    inertia_share: float
    cluster_mean_profiles: dict[int, list[float]]
    dendrogram: list[dict]            # scipy-convention merge history
    countries: list[str]              # leaf order for dendrogram indices
    profiles: dict[str, np.ndarray] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "allocation": self.allocation,
            "k": self.k,
            "inertia_share": self.inertia_share,
            "assignment": self.assignment,
            "cluster_mean_profiles": {
                str(c): profile for c, profile in sorted(self.cluster_mean_profiles.items())
            },
            "dendrogram": self.dendrogram,
        }


def cut_dendrogram(merges: list[dict], n_leaves: int, k: int) -> list[int]:
    """Leaf labels for a k-cluster cut: apply the first n-k merges.

    Labels are contiguous from 0 in leaf order. Merge entries follow
    the scipy convention: merged cluster t gets index n_leaves + t.
    """
    if not 1 <= k <= n_leaves:
        raise ValueError(f"k={k} outside [1, {n_leaves}]")
    parent = list(range(n_leaves + len(merges)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t, merge in enumerate(merges[: n_leaves - k]):
        target = n_leaves + t
        parent[find(int(merge["left"]))] = target
        parent[find(int(merge["right"]))] = target
    roots: dict[int, int] = {}
    labels = []
    for leaf in range(n_leaves):
        root = find(leaf)
        if root not in roots:
            roots[root] = len(roots)
        labels.append(roots[root])
    return labels


def _clustering_from_cut(profiles, merges, k) -> CountryClustering:
    countries = [p.country for p in profiles]
    matrix = np.vstack([p.shares for p in profiles])
    labels = cut_dendrogram(merges, len(countries), k)

    grand_mean = matrix.mean(axis=0)
    total_inertia = float(((matrix - grand_mean) ** 2).sum())
    within = 0.0
    means: dict[int, np.ndarray] = {}
    for label in sorted(set(labels)):
        members = matrix[[i for i, l in enumerate(labels) if l == label]]
        center = members.mean(axis=0)
        means[label] = center
        within += float(((members - center) ** 2).sum())
    inertia_share = 1.0 if total_inertia == 0 else 1.0 - within / total_inertia

    return CountryClustering(
        method=profiles[0].method,
        allocation=profiles[0].allocation,
        k=k,
        assignment={c: labels[i] for i, c in enumerate(countries)},
        inertia_share=inertia_share,
        cluster_mean_profiles={c: [float(v) for v in m] for c, m in means.items()},
        dendrogram=merges,
        countries=countries,
        profiles={p.country: p.shares for p in profiles},
    )


def cluster_countries(profiles: list[CountryProfile], k: int) -> CountryClustering:
    """Ward-linkage hierarchical clustering of country profiles.

    Profiles are ordered by country code before linkage, which fixes
    tie-breaking; the full merge history is kept so other cluster
    counts can be cut without re-clustering.
    """
    if not profiles:
        raise ValueError("no profiles to cluster")
    methods = {p.method for p in profiles}
    allocations = {p.allocation for p in profiles}
    if len(methods) > 1 or len(allocations) > 1:
        raise ValueError("profiles mix methods or allocations")
    if k > len(profiles):
        raise ValueError(f"k={k} exceeds the {len(profiles)} available profiles")
    profiles = sorted(profiles, key=lambda p: p.country)
    matrix = np.vstack([p.shares for p in profiles])
    if len(profiles) == 1:
        merges: list[dict] = []
    else:
        z = linkage(matrix, method="ward")
        merges = [
            {"left": int(a), "right": int(b), "height": float(h), "size": int(s)}
            for a, b, h, s in z
        ]
    return _clustering_from_cut(profiles, merges, k)


def profiles_from_json(doc: dict) -> list[CountryProfile]:
    return [
        CountryProfile(
            country=raw["country"],
            allocation=doc["allocation"],
            method=doc["method"],
            shares=np.asarray(raw["shares"], dtype=float),
            article_count=raw["article_count"],
        )
        for raw in doc["profiles"]
    ]


def clustering_from_json(clusters_doc: dict, profiles_doc: dict) -> CountryClustering:
    """Rebuild a clustering (with member profiles) from its exports."""
    profiles = {p.country: p.shares for p in profiles_from_json(profiles_doc)}
    countries = sorted(clusters_doc["assignment"])
    return CountryClustering(
        method=clusters_doc["method"],
        allocation=clusters_doc["allocation"],
        k=clusters_doc["k"],
        assignment=dict(clusters_doc["assignment"]),
        inertia_share=clusters_doc["inertia_share"],
        cluster_mean_profiles={
            int(c): list(v) for c, v in clusters_doc["cluster_mean_profiles"].items()
        },
        dendrogram=list(clusters_doc["dendrogram"]),
        countries=countries,
        profiles=profiles,
    )


def recut_clustering(clustering: CountryClustering, k: int) -> CountryClustering:
    """Cut the stored dendrogram at a different cluster count."""
    profiles = [
        CountryProfile(
            country=c,
            allocation=clustering.allocation,
            method=clustering.method,
            shares=np.asarray(clustering.profiles[c]),
            article_count=1,
        )
        for c in clustering.countries
    ]
    return _clustering_from_cut(profiles, clustering.dendrogram, k)


def export_map(clustering: CountryClustering, geometry_path) -> tuple[dict, list[str]]:
    """Join the clustering onto a GeoJSON layer keyed by ``iso_a2``.

    Returns the augmented FeatureCollection and the sidecar list of
    clustered countries missing from the geometry. Countries present
    in the geometry but not in the clustering get ``cluster: null``.
    """
    doc = json.loads(Path(geometry_path).read_text(encoding="utf-8"))
    if doc.get("type") != "FeatureCollection":
        raise ValueError(f"{geometry_path}: not a GeoJSON FeatureCollection")
    seen = set()
    features = []
    for feature in doc.get("features", []):
        code = (feature.get("properties") or {}).get("iso_a2")
        seen.add(code)
        cluster = clustering.assignment.get(code)
        profile = clustering.profiles.get(code)
        features.append(
            {
                "type": "Feature",
                "geometry": feature.get("geometry"),
                "properties": {
                    "country": code,
                    "cluster": cluster,
                    "profile": None if profile is None else [float(v) for v in profile],
                },
            }
        )
    missing = sorted(c for c in clustering.assignment if c not in seen)
    return {"type": "FeatureCollection", "features": features}, missing
