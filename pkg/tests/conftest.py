import csv
import random
from pathlib import Path

import pytest

ARTICLE_HEADER = [
    "id", "year", "language", "keywords", "authoring_countries",
    "studied_countries", "abstract", "fulltext_ref",
]
CITATION_HEADER = ["citing_id", "cited_id", "depth", "abstract"]


def write_articles_csv(path: Path, rows: list[dict]) -> Path:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=ARTICLE_HEADER)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in ARTICLE_HEADER})
    return path


def write_citations_csv(path: Path, rows: list[dict]) -> Path:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CITATION_HEADER)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in CITATION_HEADER})
    return path


def article_row(art_id, year=2005, language="en", keywords=(), authoring=(),
                studied=(), abstract="", fulltext_ref=""):
    return {
        "id": art_id,
        "year": year,
        "language": language,
        "keywords": "|".join(keywords),
        "authoring_countries": "|".join(authoring),
        "studied_countries": "|".join(studied),
        "abstract": abstract,
        "fulltext_ref": fulltext_ref,
    }


COUNTRY_POOL = ["FR", "BE", "VN", "SN", "US", "DE", "BR", "CN", "MA", "IT"]
KEYWORD_POOL = [
    "city", "network", "model", "mobility", "climate", "risk", "map",
    "simulation", "territory", "landscape", "transport", "statistics",
]


def random_article_rows(n, seed, max_keywords=5):
    rng = random.Random(seed)
    rows = []
    for i in range(n):
        keywords = rng.sample(KEYWORD_POOL, rng.randint(1, max_keywords))
        authoring = rng.sample(COUNTRY_POOL, rng.randint(1, 2))
        studied = rng.sample(COUNTRY_POOL, rng.randint(0, 3))
        rows.append(
            article_row(
                f"a{i:03d}",
                year=rng.randint(1996, 2016),
                keywords=keywords,
                authoring=authoring,
                studied=studied,
            )
        )
    return rows


@pytest.fixture
def small_corpus(tmp_path):
    from corposcope.corpus import load_corpus

    rows = [
        article_row("a1", keywords=["city", "network"], authoring=["FR"], studied=["VN"]),
        article_row("a2", keywords=["network", "model"], authoring=["VN"], studied=["FR"]),
        article_row("a3", keywords=["city", "model", "map"], authoring=["FR", "BE"], studied=["SN"]),
    ]
    return load_corpus(write_articles_csv(tmp_path / "articles.csv", rows))
