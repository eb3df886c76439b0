"""corposcope: multi-method semantic analysis of scientific corpora."""

from .config import AnalysisConfig
from .corpus import Corpus, corpus_stats, geo_flow_matrix, load_corpus
from .pipeline import AnalysisSnapshot, SnapshotStore, query_snapshot, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "AnalysisSnapshot",
    "Corpus",
    "SnapshotStore",
    "corpus_stats",
    "geo_flow_matrix",
    "load_corpus",
    "query_snapshot",
    "run_pipeline",
    "__version__",
]
