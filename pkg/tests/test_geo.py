import json

import numpy as np
import pytest

from corposcope.classification import Classification
from corposcope.corpus import load_corpus
from corposcope.geo import (
    cluster_countries,
    country_profiles,
    cut_dendrogram,
    export_map,
    recut_clustering,
    CountryProfile,
)

from conftest import article_row, write_articles_csv


def make_classification(ids, rows, method="keywords", flagged=()):
    return Classification(
        method=method,
        article_ids=list(ids),
        categories=[str(i) for i in range(len(rows[0]))],
        shares=np.array(rows, dtype=float),
        flagged=set(flagged),
    )


def make_corpus(tmp_path, tag_map, allocation="studied"):
    rows = []
    for art_id, countries in tag_map.items():
        kwargs = {"studied": countries} if allocation == "studied" else {"authoring": countries}
        rows.append(article_row(art_id, keywords=["city"], **kwargs))
    return load_corpus(write_articles_csv(tmp_path / "a.csv", rows))


class TestCountryProfiles:
    def test_single_article_country_is_that_row(self, tmp_path):
        corpus = make_corpus(tmp_path, {"a1": ["FR"], "a2": ["VN"], "a3": ["VN"]})
        cls = make_classification(
            ["a1", "a2", "a3"], [[0.2, 0.8], [1.0, 0.0], [0.0, 1.0]]
        )
        profiles = {p.country: p for p in country_profiles(cls, corpus, "studied")}
        assert np.allclose(profiles["FR"].shares, [0.2, 0.8])
        assert profiles["FR"].article_count == 1

    def test_all_articles_one_country_gives_corpus_mean(self, tmp_path):
        corpus = make_corpus(tmp_path, {"a1": ["BR"], "a2": ["BR"], "a3": ["BR"]})
        rows = [[0.2, 0.8], [1.0, 0.0], [0.0, 1.0]]
        cls = make_classification(["a1", "a2", "a3"], rows)
        profiles = country_profiles(cls, corpus, "studied")
        assert len(profiles) == 1
        assert np.allclose(profiles[0].shares, np.mean(rows, axis=0))

    def test_grouped_mean_oracle(self, tmp_path):
        rng = np.random.default_rng(3)
        countries = ["FR", "VN", "SN"]
        tag_map = {f"a{i}": [countries[i % 3]] for i in range(6)}
        corpus = make_corpus(tmp_path, tag_map)
        rows = rng.dirichlet(np.ones(4), size=6)
        cls = make_classification(list(tag_map), rows.tolist())
        profiles = {p.country: p for p in country_profiles(cls, corpus, "studied")}
        for ci, country in enumerate(countries):
            members = [rows[i] for i in range(6) if i % 3 == ci]
            assert np.allclose(profiles[country].shares, np.mean(members, axis=0))

    def test_article_order_invariance(self, tmp_path):
        corpus = make_corpus(tmp_path, {"a1": ["FR"], "a2": ["FR"], "a3": ["VN"]})
        rows = [[0.3, 0.7], [0.6, 0.4], [0.5, 0.5]]
        ids = ["a1", "a2", "a3"]
        forward = country_profiles(make_classification(ids, rows), corpus, "studied")
        perm = [2, 0, 1]
        backward = country_profiles(
            make_classification([ids[p] for p in perm], [rows[p] for p in perm]),
            corpus,
            "studied",
        )
        for p1, p2 in zip(forward, backward):
            assert p1.country == p2.country
            assert np.allclose(p1.shares, p2.shares)

    def test_flagged_rows_and_untagged_articles_excluded(self, tmp_path):
        corpus = make_corpus(tmp_path, {"a1": ["FR"], "a2": ["FR"], "a3": []})
        cls = make_classification(
            ["a1", "a2", "a3"],
            [[1.0, 0.0], [0.5, 0.5], [0.0, 1.0]],
            flagged={"a2"},
        )
        profiles = country_profiles(cls, corpus, "studied")
        assert [p.country for p in profiles] == ["FR"]
        assert np.allclose(profiles[0].shares, [1.0, 0.0])

    def test_multi_country_articles_contribute_full_row(self, tmp_path):
        corpus = make_corpus(tmp_path, {"a1": ["FR", "BE"]})
        cls = make_classification(["a1"], [[0.25, 0.75]])
        profiles = {p.country: p for p in country_profiles(cls, corpus, "studied")}
        assert set(profiles) == {"FR", "BE"}
        for p in profiles.values():
            assert np.allclose(p.shares, [0.25, 0.75])

    def test_authoring_allocation(self, tmp_path):
        corpus = make_corpus(tmp_path, {"a1": ["DE"]}, allocation="authoring")
        cls = make_classification(["a1"], [[1.0, 0.0]])
        assert country_profiles(cls, corpus, "studied") == []
        profiles = country_profiles(cls, corpus, "authoring")
        assert [p.country for p in profiles] == ["DE"]


def random_profiles(n, n_cat=5, seed=0, method="keywords"):
    rng = np.random.default_rng(seed)
    shares = rng.dirichlet(np.ones(n_cat), size=n)
    codes = [f"{chr(65 + i // 26)}{chr(65 + i % 26)}" for i in range(n)]
    return [
        CountryProfile(codes[i], "studied", method, shares[i], article_count=1)
        for i in range(n)
    ]


class TestClusterCountries:
    def test_identical_profiles_merge_at_height_zero(self):
        profiles = random_profiles(5, seed=1)
        profiles[1] = CountryProfile(
            profiles[1].country, "studied", "keywords",
            profiles[0].shares.copy(), article_count=1,
        )
        clustering = cluster_countries(profiles, k=4)
        assert clustering.dendrogram[0]["height"] == pytest.approx(0.0, abs=1e-12)
        first = clustering.dendrogram[0]
        assert {first["left"], first["right"]} == {0, 1}

    def test_k_equals_n_full_inertia(self):
        profiles = random_profiles(8, seed=2)
        clustering = cluster_countries(profiles, k=8)
        assert clustering.inertia_share == 1.0
        assert len(set(clustering.assignment.values())) == 8

    def test_inertia_share_monotone_in_k(self):
        profiles = random_profiles(50, seed=3)
        clustering = cluster_countries(profiles, k=1)
        shares = [
            recut_clustering(clustering, k).inertia_share for k in range(1, 51)
        ]
        assert shares[0] == pytest.approx(0.0, abs=1e-12)
        assert all(b >= a - 1e-12 for a, b in zip(shares, shares[1:]))
        assert shares[-1] == 1.0

    def test_dendrogram_heights_nondecreasing(self):
        profiles = random_profiles(20, seed=4)
        clustering = cluster_countries(profiles, k=3)
        heights = [m["height"] for m in clustering.dendrogram]
        assert all(b >= a for a, b in zip(heights, heights[1:]))

    def test_cluster_means_are_stochastic(self):
        profiles = random_profiles(12, seed=5)
        clustering = cluster_countries(profiles, k=3)
        for mean in clustering.cluster_mean_profiles.values():
            assert sum(mean) == pytest.approx(1.0, abs=1e-9)
            assert all(v >= -1e-12 for v in mean)

    def test_exactly_k_clusters_used(self):
        profiles = random_profiles(15, seed=6)
        for k in (1, 2, 5, 15):
            clustering = recut_clustering(cluster_countries(profiles, k=1), k)
            assert len(set(clustering.assignment.values())) == k
            assert set(clustering.assignment.values()) == set(range(k))

    def test_k_larger_than_profiles_rejected(self):
        with pytest.raises(ValueError, match="exceeds"):
            cluster_countries(random_profiles(3, seed=7), k=4)

    def test_mixed_methods_rejected(self):
        profiles = random_profiles(3, seed=8) + random_profiles(
            3, seed=9, method="topics"
        )
        with pytest.raises(ValueError, match="mix"):
            cluster_countries(profiles, k=2)

    def test_recut_matches_fresh_clustering(self):
        profiles = random_profiles(30, seed=10)
        base = cluster_countries(profiles, k=2)
        for k in (3, 6, 11):
            assert recut_clustering(base, k).assignment == cluster_countries(profiles, k=k).assignment

    def test_deterministic(self):
        profiles = random_profiles(25, seed=11)
        a = cluster_countries(profiles, k=4)
        b = cluster_countries(list(reversed(profiles)), k=4)
        assert a.assignment == b.assignment
        assert a.inertia_share == b.inertia_share


def square(code, x, y):
    return {
        "type": "Feature",
        "properties": {"iso_a2": code},
        "geometry": {
            "type": "Polygon",
            "coordinates": [[[x, y], [x + 1, y], [x + 1, y + 1], [x, y + 1], [x, y]]],
        },
    }


class TestExportMap:
    def geometry_file(self, tmp_path, codes):
        doc = {
            "type": "FeatureCollection",
            "features": [square(c, i, 0) for i, c in enumerate(codes)],
        }
        path = tmp_path / "geometry.geojson"
        path.write_text(json.dumps(doc))
        return path

    def test_full_join(self, tmp_path):
        profiles = random_profiles(3, seed=12)
        clustering = cluster_countries(profiles, k=2)
        path = self.geometry_file(tmp_path, [p.country for p in profiles])
        doc, missing = export_map(clustering, path)
        assert missing == []
        assert len(doc["features"]) == 3
        for feature in doc["features"]:
            props = feature["properties"]
            assert props["cluster"] == clustering.assignment[props["country"]]
            assert props["profile"] == pytest.approx(
                list(clustering.profiles[props["country"]])
            )

    def test_missing_geometry_goes_to_sidecar(self, tmp_path):
        profiles = random_profiles(3, seed=13)
        codes = [p.country for p in profiles]
        path = self.geometry_file(tmp_path, codes[:2] + ["ZZ"])
        doc, missing = export_map(cluster_countries(profiles, k=2), path)
        assert missing == [codes[2]]
        # still a valid FeatureCollection, unknown geometry country gets null cluster
        assert doc["type"] == "FeatureCollection"
        zz = [f for f in doc["features"] if f["properties"]["country"] == "ZZ"][0]
        assert zz["properties"]["cluster"] is None


def test_cut_dendrogram_singleton():
    assert cut_dendrogram([], 1, 1) == [0]
