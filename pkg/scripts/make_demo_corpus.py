#!/usr/bin/env python3
"""Regenerate the bundled demo corpus under fixtures/demo/.

Deterministic: two thematic camps (urban systems vs environmental
risk) across keywords, citation-neighborhood abstracts and full texts,
spread over a handful of authoring/studied countries.
"""

import csv
import json
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from corposcope.topics import Token, write_token_stream_file  # noqa: E402

OUT = ROOT / "fixtures" / "demo"

URBAN = {
    "keywords": ["city", "network", "transport", "mobility", "density", "accessibility"],
    "abstract_words": [
        "urban", "transport", "network", "city", "mobility", "street",
        "density", "housing", "commute", "traffic", "accessibility",
    ],
    "nouns": [
        "city", "network", "transport", "mobility", "density", "street",
        "housing", "traffic", "infrastructure", "neighborhood", "suburb",
        "metropolis", "commute", "accessibility", "vehicle",
    ],
    "authoring": ["FR", "BE", "CH"],
    "studied": ["VN", "SN", "MA", "TH"],
}
ENVIRO = {
    "keywords": ["climate", "risk", "flood", "water", "coast", "vulnerability"],
    "abstract_words": [
        "climate", "flood", "risk", "water", "coast", "drought",
        "vulnerability", "hazard", "erosion", "temperature", "rain",
    ],
    "nouns": [
        "climate", "risk", "flood", "water", "coast", "drought",
        "vulnerability", "hazard", "erosion", "temperature", "sea",
        "soil", "vegetation", "forest", "earthquake",
    ],
    "authoring": ["US", "DE", "NL"],
    "studied": ["BR", "ID", "KE", "EG"],
}
VERBS = ["study", "analyze", "measure", "grow", "increase", "observe", "compare", "estimate"]
DETS = ["the", "a", "this", "these"]
ADJS = ["large", "small", "new", "regional"]


def sentence(rng, nouns):
    words = []
    for _ in range(rng.randint(2, 4)):
        words.append(rng.choice(DETS))
        if rng.random() < 0.3:
            words.append(rng.choice(ADJS))
        words.append(rng.choice(nouns))
        if rng.random() < 0.6:
            words.append(rng.choice(VERBS))
    return words


def abstract_text(rng, theme, n_words=14):
    pool = theme["abstract_words"]
    return " ".join(rng.choices(pool, k=n_words))


def main():
    rng = random.Random(2016)
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "fulltext").mkdir(exist_ok=True)

    from corposcope.topics import tag_text

    articles = []
    citations = []
    n_articles = 24
    for i in range(n_articles):
        theme = URBAN if i % 2 == 0 else ENVIRO
        art_id = f"a{i:03d}"
        keywords = rng.sample(theme["keywords"], rng.randint(3, 5))
        if rng.random() < 0.25:
            other = ENVIRO if theme is URBAN else URBAN
            keywords.append(rng.choice(other["keywords"]))
        authoring = rng.sample(theme["authoring"], rng.randint(1, 2))
        studied = rng.sample(theme["studied"], rng.randint(1, 2))
        if rng.random() < 0.2:
            other = ENVIRO if theme is URBAN else URBAN
            studied.append(rng.choice(other["studied"]))

        words = []
        for _ in range(rng.randint(10, 14)):
            words.extend(sentence(rng, theme["nouns"]))
        tokens = tag_text(" ".join(words))
        ref = f"fulltext/{art_id}.tsv"
        write_token_stream_file(OUT / ref, [tokens])

        articles.append({
            "id": art_id,
            "year": 1996 + (i * 20) // n_articles,
            "language": "en",
            "keywords": "|".join(sorted(set(keywords))),
            "authoring_countries": "|".join(authoring),
            "studied_countries": "|".join(studied),
            "abstract": abstract_text(rng, theme),
            "fulltext_ref": ref,
        })

        # depth-1 citers of this article, each with a depth-2 citer
        for j in range(rng.randint(1, 3)):
            citer = f"x{i:03d}{j}"
            citations.append({
                "citing_id": citer, "cited_id": art_id, "depth": 1,
                "abstract": abstract_text(rng, theme),
            })
            if rng.random() < 0.7:
                citations.append({
                    "citing_id": f"y{i:03d}{j}", "cited_id": citer, "depth": 2,
                    "abstract": abstract_text(rng, theme),
                })
        # references made by the article
        if rng.random() < 0.5:
            citations.append({
                "citing_id": art_id, "cited_id": f"r{i:03d}", "depth": 1,
                "abstract": abstract_text(rng, theme),
            })

    with (OUT / "articles.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=[
            "id", "year", "language", "keywords", "authoring_countries",
            "studied_countries", "abstract", "fulltext_ref",
        ])
        writer.writeheader()
        writer.writerows(articles)

    with (OUT / "citations.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=["citing_id", "cited_id", "depth", "abstract"])
        writer.writeheader()
        writer.writerows(citations)

    codes = sorted(
        set(URBAN["authoring"]) | set(URBAN["studied"])
        | set(ENVIRO["authoring"]) | set(ENVIRO["studied"])
    )
    features = []
    for idx, code in enumerate(codes):
        x, y = (idx % 4) * 2, (idx // 4) * 2
        features.append({
            "type": "Feature",
            "properties": {"iso_a2": code},
            "geometry": {
                "type": "Polygon",
                "coordinates": [[[x, y], [x + 1, y], [x + 1, y + 1], [x, y + 1], [x, y]]],
            },
        })
    (OUT / "geometry.geojson").write_text(
        json.dumps({"type": "FeatureCollection", "features": features}, indent=1) + "\n"
    )

    config = {
        "seed": 0,
        "citations": {"ngram_max": 1, "N_k": 300, "grid": [[1, 50], [2, 50], [2, 20]]},
        "topics": {
            "K": 2, "iterations": 150, "burn_in": 50, "thinning": 10,
            "evolution_threshold": 0.3,
        },
        "geo": {"k": 3},
        "compare": {"bootstrap_reps": 50},
    }
    (OUT / "config.json").write_text(json.dumps(config, indent=1) + "\n")
    print(f"wrote demo corpus: {len(articles)} articles, {len(citations)} citations -> {OUT}")


if __name__ == "__main__":
    main()
