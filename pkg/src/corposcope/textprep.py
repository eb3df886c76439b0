"""Text cleaning and n-gram machinery for abstract mining.

Cleaning is deliberately light: lowercase, punctuation stripped,
stop-words dropped from a bundled per-language list. N-grams are
formed over consecutive surviving tokens and never cross sentence
boundaries.
"""

import re
from collections import Counter
from functools import lru_cache
from importlib import resources

_SENTENCE_SPLIT = re.compile(r"[.!?;:]+")
_TOKEN = re.compile(r"[^\W_]{2,}", re.UNICODE)  # alphanumeric runs, len >= 2


@lru_cache(maxsize=None)
def stopwords(language: str) -> frozenset:
    """Bundled stop-word list for a 2-letter language code (may be empty)."""
    name = f"stopwords_{language}.txt"
    try:
        text = resources.files("corposcope.data").joinpath(name).read_text("utf-8")
    except FileNotFoundError:
        return frozenset()
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


def clean_sentences(text: str, language: str = "en") -> list[list[str]]:
    """Split into sentences and return cleaned token lists."""
    stops = stopwords(language)
    out = []
    for sentence in _SENTENCE_SPLIT.split(text):
        tokens = [
            t for t in _TOKEN.findall(sentence.lower())
            if t not in stops and not t.isdigit()
        ]
        if tokens:
            out.append(tokens)
    return out


def ngram_counts(sentences: list[list[str]], ngram_max: int) -> Counter:
    """Occurrence counts of all n-grams (1..ngram_max), space-joined."""
    counts: Counter = Counter()
    for tokens in sentences:
        for n in range(1, ngram_max + 1):
            for i in range(len(tokens) - n + 1):
                counts[" ".join(tokens[i : i + n])] += 1
    return counts


def count_vocabulary(sentences: list[list[str]], vocabulary: set, ngram_max: int) -> Counter:
    """Occurrence counts restricted to a known n-gram vocabulary."""
    counts: Counter = Counter()
    for tokens in sentences:
        for n in range(1, ngram_max + 1):
            for i in range(len(tokens) - n + 1):
                gram = " ".join(tokens[i : i + n])
                if gram in vocabulary:
                    counts[gram] += 1
    return counts
