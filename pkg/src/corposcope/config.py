"""Analysis configuration: one record naming every tunable parameter.

Absent keys fall back to module defaults, so an empty JSON object is a
valid config. The canonical JSON form (sorted keys) feeds the snapshot
digest.
"""

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional


@dataclass
class CitationSettings:
    ngram_max: int = 3
    N_k: int = 50000
    grid: list = field(
        default_factory=lambda: [
            [1.0, 200], [2.0, 200], [2.0, 100], [3.0, 100],
            [5.0, 100], [2.0, 50], [3.0, 50], [5.0, 50],
        ]
    )
    choose: Optional[list] = None      # explicit [theta_w, k_max] override
    language: str = "en"
    include_depth2: bool = True


@dataclass
class TopicSettings:
    language: Optional[str] = None     # None: language with the most full texts
    K: int = 20
    candidates: Optional[list] = None  # when set, select K among these
    replications: int = 10
    iterations: int = 1000
    burn_in: int = 200
    thinning: int = 10
    alpha: Optional[float] = None      # None: 50/K
    eta: float = 0.01
    drop_determiners: bool = False
    heldout_fraction: float = 0.1
    top_words: int = 20
    evolution_threshold: float = 0.1


@dataclass
class GeoSettings:
    k: int = 4


@dataclass
class CompareSettings:
    bootstrap_reps: int = 10000
    shuffle_fraction: float = 0.5
    thresholds: Optional[list] = None  # None: percentile-spaced defaults


@dataclass
class AnalysisConfig:
    seed: int = 0
    citations: CitationSettings = field(default_factory=CitationSettings)
    topics: TopicSettings = field(default_factory=TopicSettings)
    geo: GeoSettings = field(default_factory=GeoSettings)
    compare: CompareSettings = field(default_factory=CompareSettings)

    def to_json(self) -> dict:
        return asdict(self)

    def canonical(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, doc: Optional[dict]) -> "AnalysisConfig":
        doc = doc or {}
        known = {"seed", "citations", "topics", "geo", "compare"}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")

        def build(section_cls, key):
            section = doc.get(key) or {}
            names = {f.name for f in section_cls.__dataclass_fields__.values()}
            bad = set(section) - names
            if bad:
                raise ValueError(f"unknown config keys in {key!r}: {sorted(bad)}")
            return section_cls(**section)

        return cls(
            seed=int(doc.get("seed", 0)),
            citations=build(CitationSettings, "citations"),
            topics=build(TopicSettings, "topics"),
            geo=build(GeoSettings, "geo"),
            compare=build(CompareSettings, "compare"),
        )

    @classmethod
    def from_file(cls, path) -> "AnalysisConfig":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))
