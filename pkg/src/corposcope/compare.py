"""Pairwise complementarity of classifications.

Three views quantify how two classifications of the same articles
relate: flow matrices (summed outer products of membership rows),
column correlations framed by two bootstrap null models (full row
shuffle below, 50% self-shuffle above), and the relative multi-class
modularity of one classification inside the document network induced
by the other at varying distance thresholds.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .classification import Classification

AGGREGATES = ("min", "max", "mean_abs")


def _shared_rows(a: Classification, b: Classification):
    """Aligned share matrices over commonly classified articles."""
    ids = sorted(
        (set(a.article_ids) - a.flagged) & (set(b.article_ids) - b.flagged)
    )
    if not ids:
        raise ValueError("no articles classified by both methods")
    index_a = {art: i for i, art in enumerate(a.article_ids)}
    index_b = {art: i for i, art in enumerate(b.article_ids)}
    mat_a = a.shares[[index_a[i] for i in ids]]
    mat_b = b.shares[[index_b[i] for i in ids]]
    return ids, mat_a, mat_b


@dataclass
class FlowMatrix:
    method_a: str
    method_b: str
    categories_a: list[str]
    categories_b: list[str]
    flows: np.ndarray
    article_count: int

    def to_json(self) -> dict:
        return {
            "method_a": self.method_a,
            "method_b": self.method_b,
            "categories_a": self.categories_a,
            "categories_b": self.categories_b,
            "flows": [[float(v) for v in row] for row in self.flows],
            "article_count": self.article_count,
        }

    def to_sankey(self) -> dict:
        """Alluvial-diagram payload: nodes with sizes, weighted links."""
        nodes = [
            {"method": self.method_a, "category": c, "size": float(s)}
            for c, s in zip(self.categories_a, self.flows.sum(axis=1))
        ] + [
            {"method": self.method_b, "category": c, "size": float(s)}
            for c, s in zip(self.categories_b, self.flows.sum(axis=0))
        ]
        offset = len(self.categories_a)
        links = [
            {"source": i, "target": offset + j, "value": float(self.flows[i, j])}
            for i in range(len(self.categories_a))
            for j in range(len(self.categories_b))
            if self.flows[i, j] > 0
        ]
        return {"nodes": nodes, "links": links}


def flow_matrix(a: Classification, b: Classification) -> FlowMatrix:
    """Sum of per-article outer products of membership rows.

    Accumulated article by article (not as one matrix product) so that
    swapping the arguments transposes the result bit for bit.
    """
    ids, mat_a, mat_b = _shared_rows(a, b)
    flows = np.zeros((mat_a.shape[1], mat_b.shape[1]))
    for r in range(len(ids)):
        flows += np.outer(mat_a[r], mat_b[r])
    return FlowMatrix(
        method_a=a.method,
        method_b=b.method,
        categories_a=list(a.categories),
        categories_b=list(b.categories),
        flows=flows,
        article_count=len(ids),
    )


def _cross_correlation(mat_a: np.ndarray, mat_b: np.ndarray):
    """Pearson correlations between columns; NaN marks zero-variance pairs."""
    n = mat_a.shape[0]
    ca = mat_a - mat_a.mean(axis=0)
    cb = mat_b - mat_b.mean(axis=0)
    sa = ca.std(axis=0)
    sb = cb.std(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = (ca.T @ cb) / n / np.outer(sa, sb)
    rho[np.outer(sa == 0, np.ones(len(sb), bool))] = np.nan
    rho[np.outer(np.ones(len(sa), bool), sb == 0)] = np.nan
    return rho


def _aggregates(rho: np.ndarray) -> Optional[dict]:
    defined = rho[~np.isnan(rho)]
    if defined.size == 0:
        return None
    # summing sorted magnitudes keeps the aggregate independent of cell
    # order, so swapping the classifications transposes rho bit for bit
    return {
        "min": float(defined.min()),
        "max": float(defined.max()),
        "mean_abs": float(np.sort(np.abs(defined)).mean()),
    }


@dataclass
class CorrelationReport:
    method_a: str
    method_b: str
    rho: np.ndarray                      # NaN where undefined
    min_rho: float
    max_rho: float
    mean_abs_rho: float
    null_lower: dict                     # aggregate -> {mean, sd}
    null_upper: dict
    b: int
    shuffle_fraction: float
    undefined_cells: int = 0
    sd_basis: str = "per-repetition values after pooling both shuffle directions"

    def to_json(self) -> dict:
        return {
            "method_a": self.method_a,
            "method_b": self.method_b,
            "rho": [[None if np.isnan(v) else float(v) for v in row] for row in self.rho],
            "min_rho": self.min_rho,
            "max_rho": self.max_rho,
            "mean_abs_rho": self.mean_abs_rho,
            "null_lower": self.null_lower,
            "null_upper": self.null_upper,
            "b": self.b,
            "shuffle_fraction": self.shuffle_fraction,
            "undefined_cells": self.undefined_cells,
            "sd_basis": self.sd_basis,
        }

    def rho_csv(self) -> str:
        lines = [",".join([""] + [f"b{j}" for j in range(self.rho.shape[1])])]
        for i, row in enumerate(self.rho):
            cells = ["" if np.isnan(v) else repr(float(v)) for v in row]
            lines.append(",".join([f"a{i}"] + cells))
        return "\n".join(lines) + "\n"


def correlation_report(
    a: Classification,
    b: Classification,
    b_reps: int,
    seed: int,
    shuffle_fraction: float = 0.5,
) -> CorrelationReport:
    """Column correlations framed by bootstrap null models.

    The lower null shuffles all rows of one matrix (each side in turn,
    same permutation, results pooled within the repetition); the upper
    null correlates each matrix with a copy of itself in which a fixed
    fraction of rows were shuffled. Repetition r draws its generator
    from (seed, r), so repetitions are independent and the report is
    reproducible and symmetric under argument swap.
    """
    if b_reps < 1:
        raise ValueError("b_reps must be >= 1")
    ids, mat_a, mat_b = _shared_rows(a, b)
    n = len(ids)
    if n < 3:
        raise ValueError(f"need at least 3 shared articles, got {n}")

    rho = _cross_correlation(mat_a, mat_b)
    observed = _aggregates(rho)
    if observed is None:
        raise ValueError("every correlation cell is undefined (constant columns)")

    n_shuffled = int(round(shuffle_fraction * n))
    lower_samples: dict[str, list] = {key: [] for key in AGGREGATES}
    upper_samples: dict[str, list] = {key: [] for key in AGGREGATES}
    for rep in range(b_reps):
        rng = np.random.default_rng([seed, rep])
        perm = rng.permutation(n)
        pooled = []
        for stats in (
            _aggregates(_cross_correlation(mat_a[perm], mat_b)),
            _aggregates(_cross_correlation(mat_a, mat_b[perm])),
        ):
            if stats is not None:
                pooled.append(stats)
        for key in AGGREGATES:
            lower_samples[key].append(float(np.mean([s[key] for s in pooled])))

        idx = rng.choice(n, size=n_shuffled, replace=False)
        sub_perm = rng.permutation(n_shuffled)
        pooled = []
        for mat in (mat_a, mat_b):
            shuffled = mat.copy()
            shuffled[idx] = mat[idx[sub_perm]]
            stats = _aggregates(_cross_correlation(mat, shuffled))
            if stats is not None:
                pooled.append(stats)
        for key in AGGREGATES:
            upper_samples[key].append(float(np.mean([s[key] for s in pooled])))

    def summarize(samples):
        out = {}
        for key in AGGREGATES:
            values = np.array(samples[key])
            sd = float(values.std(ddof=1)) if len(values) > 1 else 0.0
            out[key] = {"mean": float(values.mean()), "sd": sd}
        return out

    return CorrelationReport(
        method_a=a.method,
        method_b=b.method,
        rho=rho,
        min_rho=observed["min"],
        max_rho=observed["max"],
        mean_abs_rho=observed["mean_abs"],
        null_lower=summarize(lower_samples),
        null_upper=summarize(upper_samples),
        b=b_reps,
        shuffle_fraction=shuffle_fraction,
        undefined_cells=int(np.isnan(rho).sum()),
    )


def multiclass_modularity(adjacency: np.ndarray, memberships: np.ndarray) -> float:
    """Modularity extended to fractional memberships.

    Belonging coefficients combine as a product, so the value reduces
    to standard Newman modularity on indicator memberships.
    """
    degrees = adjacency.sum(axis=1)
    m2 = float(degrees.sum())
    if m2 <= 0:
        raise ValueError("network has no edges")
    q = 0.0
    for c in range(memberships.shape[1]):
        alpha = memberships[:, c]
        q += float(alpha @ adjacency @ alpha) - float(degrees @ alpha) ** 2 / m2
    return q / m2


@dataclass
class ModularityCurve:
    method_a: str
    method_b: str
    thresholds: list[float]
    relative_modularity: list[Optional[float]]
    modularity_a: list[Optional[float]] = field(default_factory=list)
    modularity_b: list[Optional[float]] = field(default_factory=list)
    edge_counts: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "method_a": self.method_a,
            "method_b": self.method_b,
            "thresholds": self.thresholds,
            "relative_modularity": self.relative_modularity,
            "modularity_a": self.modularity_a,
            "modularity_b": self.modularity_b,
            "edge_counts": self.edge_counts,
        }


def default_thresholds(b: Classification, count: int = 20):
    """Evenly spaced between the 1st and 99th percentile of pairwise
    distances between the classification's rows."""
    rows = b.shares[[i for i, art in enumerate(b.article_ids) if art not in b.flagged]]
    sq = ((rows[:, None, :] - rows[None, :, :]) ** 2).sum(axis=2)
    dists = np.sqrt(sq[np.triu_indices(len(rows), k=1)])
    lo, hi = np.percentile(dists, [1, 99])
    lo = max(float(lo), 1e-9)  # identical rows put the 1st percentile at 0
    if hi <= lo:
        hi = lo * 10
    return [float(v) for v in np.linspace(lo, hi, count)]


def modularity_curve(a: Classification, b: Classification, thresholds=None) -> ModularityCurve:
    """Relative multi-class modularity of ``a`` in ``b``-induced networks.

    For each threshold, documents are linked when the Euclidean
    distance between their ``b`` rows is below it; the curve reports
    the modularity of ``a``'s memberships divided by ``b``'s own in the
    same network. Ratios are unset when the network is empty or the
    denominator is non-positive.
    """
    if thresholds is None:
        thresholds = default_thresholds(b)
    thresholds = [float(t) for t in thresholds]
    if any(t <= 0 for t in thresholds):
        raise ValueError("thresholds must be positive")
    if any(t2 <= t1 for t1, t2 in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be strictly ascending")

    ids, mat_a, mat_b = _shared_rows(a, b)
    n = len(ids)
    sq = ((mat_b[:, None, :] - mat_b[None, :, :]) ** 2).sum(axis=2)
    distances = np.sqrt(np.maximum(sq, 0.0))

    relative: list[Optional[float]] = []
    q_a_list: list[Optional[float]] = []
    q_b_list: list[Optional[float]] = []
    edge_counts: list[int] = []
    any_edges = False
    for theta in thresholds:
        adjacency = (distances < theta).astype(float)
        np.fill_diagonal(adjacency, 0.0)
        edges = int(adjacency.sum() // 2)
        edge_counts.append(edges)
        if edges == 0:
            relative.append(None)
            q_a_list.append(None)
            q_b_list.append(None)
            continue
        any_edges = True
        q_a = multiclass_modularity(adjacency, mat_a)
        q_b = multiclass_modularity(adjacency, mat_b)
        q_a_list.append(q_a)
        q_b_list.append(q_b)
        relative.append(q_a / q_b if q_b > 0 else None)
    if not any_edges:
        raise ValueError("every threshold yields an empty network")
    return ModularityCurve(
        method_a=a.method,
        method_b=b.method,
        thresholds=thresholds,
        relative_modularity=relative,
        modularity_a=q_a_list,
        modularity_b=q_b_list,
        edge_counts=edge_counts,
    )
