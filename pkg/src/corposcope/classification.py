"""Article classifications: stochastic membership matrices.

Every method (declared keywords, citation semantics, full-text topics)
reduces to the same shape: an articles x categories matrix whose rows
sum to 1. Rows that could not really be classified are kept as uniform
placeholders and flagged, so matrix operations stay well-defined while
downstream aggregations can exclude them.
"""

from dataclasses import dataclass, field

import numpy as np

KEYWORDS = "keywords"
CITATIONS = "citations"
TOPICS = "topics"

METHODS = (KEYWORDS, CITATIONS, TOPICS)


@dataclass
class Classification:
    method: str
    article_ids: list[str]
    categories: list[str]
    shares: np.ndarray  # len(article_ids) x len(categories)
    flagged: set[str] = field(default_factory=set)  # uniform placeholder rows

    def __post_init__(self):
        self.shares = np.asarray(self.shares, dtype=float)
        if self.shares.shape != (len(self.article_ids), len(self.categories)):
            raise ValueError(
                f"shares shape {self.shares.shape} does not match "
                f"{len(self.article_ids)} articles x {len(self.categories)} categories"
            )
        if len(self.article_ids):
            sums = self.shares.sum(axis=1)
            if np.any(self.shares < -1e-12) or np.any(np.abs(sums - 1.0) > 1e-9):
                raise ValueError(f"{self.method}: rows are not stochastic vectors")

    def row(self, article_id: str) -> np.ndarray:
        return self.shares[self.article_ids.index(article_id)]

    def classified_ids(self) -> list[str]:
        """Article ids excluding flagged placeholder rows."""
        return [a for a in self.article_ids if a not in self.flagged]

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "article_ids": self.article_ids,
            "categories": self.categories,
            "shares": [[float(v) for v in row] for row in self.shares],
            "flagged": sorted(self.flagged),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Classification":
        return cls(
            method=doc["method"],
            article_ids=list(doc["article_ids"]),
            categories=list(doc["categories"]),
            shares=np.array(doc["shares"], dtype=float),
            flagged=set(doc.get("flagged", [])),
        )


def uniform_row(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)
