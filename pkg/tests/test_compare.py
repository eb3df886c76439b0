import math

import numpy as np
import pytest

from corposcope.classification import Classification
from corposcope.compare import (
    correlation_report,
    default_thresholds,
    flow_matrix,
    modularity_curve,
    multiclass_modularity,
)


def make_classification(ids, rows, method="keywords", flagged=()):
    rows = np.array(rows, dtype=float)
    return Classification(
        method=method,
        article_ids=list(ids),
        categories=[f"{method[:2]}{i}" for i in range(rows.shape[1])],
        shares=rows,
        flagged=set(flagged),
    )


def random_stochastic(n, m, seed):
    rng = np.random.default_rng(seed)
    rows = rng.random((n, m))
    return rows / rows.sum(axis=1, keepdims=True)


class TestFlowMatrix:
    def test_identical_hard_classifications_are_diagonal(self):
        ids = [f"a{i}" for i in range(6)]
        rows = np.eye(3)[[0, 1, 2, 0, 1, 0]]
        a = make_classification(ids, rows, method="keywords")
        b = make_classification(ids, rows, method="topics")
        fm = flow_matrix(a, b)
        assert np.allclose(fm.flows, np.diag([3, 2, 1]))

    def test_single_article_outer_product(self):
        a = make_classification(["a1"], [[0.5, 0.5]])
        b = make_classification(["a1"], [[1.0, 0.0]], method="topics")
        fm = flow_matrix(a, b)
        assert fm.flows.tolist() == [[0.5, 0.0], [0.5, 0.0]]

    def test_mass_conservation_and_exact_transpose(self):
        ids = [f"a{i}" for i in range(737)]
        a = make_classification(ids, random_stochastic(737, 10, seed=1))
        b = make_classification(ids, random_stochastic(737, 12, seed=2), method="topics")
        fm = flow_matrix(a, b)
        assert fm.flows.sum() == pytest.approx(737, rel=1e-6)
        swapped = flow_matrix(b, a)
        assert np.array_equal(swapped.flows, fm.flows.T)

    def test_intersection_taken(self):
        a = make_classification(["a1", "a2"], [[1.0, 0.0], [0.0, 1.0]])
        b = make_classification(["a2", "a3"], [[0.5, 0.5], [1.0, 0.0]], method="topics")
        fm = flow_matrix(a, b)
        assert fm.article_count == 1
        assert fm.flows.sum() == pytest.approx(1.0)

    def test_flagged_rows_excluded(self):
        a = make_classification(["a1", "a2"], [[1.0, 0.0], [0.5, 0.5]], flagged={"a2"})
        b = make_classification(["a1", "a2"], [[1.0, 0.0], [0.5, 0.5]], method="topics")
        assert flow_matrix(a, b).article_count == 1

    def test_empty_intersection_rejected(self):
        a = make_classification(["a1"], [[1.0]])
        b = make_classification(["b1"], [[1.0]], method="topics")
        with pytest.raises(ValueError, match="no articles"):
            flow_matrix(a, b)

    def test_sankey_payload(self):
        a = make_classification(["a1", "a2"], [[1.0, 0.0], [0.0, 1.0]])
        b = make_classification(["a1", "a2"], [[1.0], [1.0]], method="topics")
        sankey = flow_matrix(a, b).to_sankey()
        assert len(sankey["nodes"]) == 3
        assert all(link["value"] > 0 for link in sankey["links"])
        total = sum(link["value"] for link in sankey["links"])
        assert total == pytest.approx(2.0)


class TestCorrelationReport:
    def test_self_comparison_max_is_one(self):
        ids = [f"a{i}" for i in range(50)]
        a = make_classification(ids, random_stochastic(50, 4, seed=3))
        report = correlation_report(a, a, b_reps=5, seed=0)
        assert report.max_rho == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(np.diag(report.rho), 1.0, atol=1e-12)

    def test_constant_column_excluded_with_count(self):
        ids = [f"a{i}" for i in range(20)]
        rows = random_stochastic(20, 3, seed=4)
        rows[:, 0] = 0.25
        rows[:, 1:] *= (0.75 / rows[:, 1:].sum(axis=1, keepdims=True))
        a = make_classification(ids, rows)
        b = make_classification(ids, random_stochastic(20, 2, seed=5), method="topics")
        report = correlation_report(a, b, b_reps=3, seed=1)
        assert report.undefined_cells == 2
        assert np.isnan(report.rho[0]).all()
        assert not math.isnan(report.max_rho)

    def test_too_few_shared_articles_rejected(self):
        a = make_classification(["a1", "a2"], [[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(ValueError, match="at least 3"):
            correlation_report(a, a, b_reps=1, seed=0)

    def test_deterministic_given_seed(self):
        ids = [f"a{i}" for i in range(40)]
        a = make_classification(ids, random_stochastic(40, 5, seed=6))
        b = make_classification(ids, random_stochastic(40, 4, seed=7), method="topics")
        r1 = correlation_report(a, b, b_reps=20, seed=9)
        r2 = correlation_report(a, b, b_reps=20, seed=9)
        assert r1.null_lower == r2.null_lower
        assert r1.null_upper == r2.null_upper

    def test_swap_symmetry_exact(self):
        ids = [f"a{i}" for i in range(60)]
        a = make_classification(ids, random_stochastic(60, 5, seed=10))
        b = make_classification(ids, random_stochastic(60, 3, seed=11), method="topics")
        fwd = correlation_report(a, b, b_reps=10, seed=2)
        bwd = correlation_report(b, a, b_reps=10, seed=2)
        assert np.array_equal(fwd.rho, bwd.rho.T)
        assert fwd.min_rho == bwd.min_rho
        assert fwd.max_rho == bwd.max_rho
        assert fwd.mean_abs_rho == bwd.mean_abs_rho
        assert fwd.null_lower == bwd.null_lower
        assert fwd.null_upper == bwd.null_upper

    def test_upper_band_above_lower_band(self):
        ids = [f"a{i}" for i in range(200)]
        a = make_classification(ids, random_stochastic(200, 6, seed=12))
        b = make_classification(ids, random_stochastic(200, 5, seed=13), method="topics")
        report = correlation_report(a, b, b_reps=100, seed=3)
        assert (
            report.null_upper["max"]["mean"]
            > report.null_lower["max"]["mean"] + report.null_upper["max"]["sd"]
        )
        assert report.null_upper["mean_abs"]["mean"] > report.null_lower["mean_abs"]["mean"]

    def test_lower_null_matches_monte_carlo_oracle(self):
        # oracle: mean |Pearson| of independent permuted columns, estimated
        # directly over fresh replications
        n = 200
        ids = [f"a{i}" for i in range(n)]
        mat_a = random_stochastic(n, 4, seed=14)
        mat_b = random_stochastic(n, 4, seed=15)
        a = make_classification(ids, mat_a)
        b = make_classification(ids, mat_b, method="topics")
        report = correlation_report(a, b, b_reps=300, seed=4)

        rng = np.random.default_rng(99)
        samples = []
        for _ in range(1000):
            perm = rng.permutation(n)
            ca = mat_a[perm] - mat_a.mean(axis=0)
            cb = mat_b - mat_b.mean(axis=0)
            rho = (ca.T @ cb) / n / np.outer(ca.std(axis=0), cb.std(axis=0))
            samples.append(np.abs(rho).mean())
        oracle_mean = float(np.mean(samples))
        oracle_sd = float(np.std(samples))
        assert abs(report.null_lower["mean_abs"]["mean"] - oracle_mean) <= 3 * oracle_sd

    def test_mean_abs_rho_decreases_with_rows(self):
        values = []
        for n in (100, 500, 2000):
            ids = [f"a{i}" for i in range(n)]
            a = make_classification(ids, random_stochastic(n, 5, seed=20 + n))
            b = make_classification(ids, random_stochastic(n, 5, seed=21 + n), method="topics")
            report = correlation_report(a, b, b_reps=1, seed=0)
            values.append(report.mean_abs_rho)
        assert values[0] > values[1] > values[2]


def multiclass_oracle(adjacency, memberships):
    """Direct double sum over ordered node pairs and categories."""
    n = adjacency.shape[0]
    k = adjacency.sum(axis=1)
    m2 = k.sum()
    q = 0.0
    for c in range(memberships.shape[1]):
        for i in range(n):
            for j in range(n):
                q += (adjacency[i, j] - k[i] * k[j] / m2) * memberships[i, c] * memberships[j, c]
    return q / m2


class TestModularityCurve:
    def planted(self, n=30, noise=0.05, seed=16):
        rng = np.random.default_rng(seed)
        ids = [f"a{i}" for i in range(n)]
        base = np.zeros((n, 2))
        base[: n // 2, 0] = 1.0
        base[n // 2:, 1] = 1.0
        jitter = rng.random((n, 2)) * noise
        rows_b = base + jitter
        rows_b /= rows_b.sum(axis=1, keepdims=True)
        rows_a = np.zeros((n, 3))
        rows_a[: n // 2, 0] = 1.0
        rows_a[n // 2:, 2] = 1.0
        return (
            make_classification(ids, rows_a, method="keywords"),
            make_classification(ids, rows_b, method="topics"),
        )

    def test_self_comparison_is_one(self):
        _, b = self.planted()
        curve = modularity_curve(b, b, thresholds=[0.05, 0.2, 0.5])
        for value in curve.relative_modularity:
            if value is not None:
                assert value == pytest.approx(1.0, abs=1e-9)
        assert any(v is not None for v in curve.relative_modularity)

    def test_matches_direct_summation_oracle(self):
        a, b = self.planted()
        thresholds = [0.1, 0.4, 0.9]
        curve = modularity_curve(a, b, thresholds=thresholds)
        ids, mat_a, mat_b = (
            a.article_ids,
            a.shares,
            b.shares,
        )
        d = np.sqrt(((mat_b[:, None] - mat_b[None, :]) ** 2).sum(axis=2))
        for ti, theta in enumerate(thresholds):
            adjacency = (d < theta).astype(float)
            np.fill_diagonal(adjacency, 0.0)
            if adjacency.sum() == 0:
                assert curve.relative_modularity[ti] is None
                continue
            q_a = multiclass_oracle(adjacency, mat_a)
            q_b = multiclass_oracle(adjacency, mat_b)
            if q_b <= 0:
                assert curve.relative_modularity[ti] is None
            else:
                assert curve.relative_modularity[ti] == pytest.approx(q_a / q_b, abs=1e-9)

    def test_complete_graph_ratio_unset(self):
        a, b = self.planted()
        curve = modularity_curve(a, b, thresholds=[50.0])
        assert curve.relative_modularity == [None]
        assert curve.edge_counts[0] == 30 * 29 // 2

    def test_reduces_to_newman_on_indicators(self):
        from corposcope.community import modularity as newman

        adjacency = np.array(
            [
                [0, 1, 1, 0, 0, 0],
                [1, 0, 1, 0, 0, 0],
                [1, 1, 0, 1, 0, 0],
                [0, 0, 1, 0, 1, 1],
                [0, 0, 0, 1, 0, 1],
                [0, 0, 0, 1, 1, 0],
            ],
            dtype=float,
        )
        memberships = np.zeros((6, 2))
        memberships[:3, 0] = 1.0
        memberships[3:, 1] = 1.0
        adj_dict = {
            i: {j: 1.0 for j in range(6) if adjacency[i, j] > 0} for i in range(6)
        }
        hard = {i: 0 if i < 3 else 1 for i in range(6)}
        assert multiclass_modularity(adjacency, memberships) == pytest.approx(
            newman(adj_dict, hard), abs=1e-12
        )

    def test_threshold_validation(self):
        a, b = self.planted()
        with pytest.raises(ValueError, match="ascending"):
            modularity_curve(a, b, thresholds=[0.5, 0.2])
        with pytest.raises(ValueError, match="positive"):
            modularity_curve(a, b, thresholds=[-0.1, 0.5])

    def test_all_empty_rejected(self):
        a, b = self.planted()
        with pytest.raises(ValueError, match="empty network"):
            modularity_curve(a, b, thresholds=[1e-12])

    def test_default_thresholds_strictly_ascending(self):
        _, b = self.planted()
        thresholds = default_thresholds(b)
        assert len(thresholds) == 20
        assert all(t2 > t1 for t1, t2 in zip(thresholds, thresholds[1:]))
