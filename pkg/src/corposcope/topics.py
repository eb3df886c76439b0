"""Full-text topic allocation via latent Dirichlet allocation.

Token streams (surface, lemma, part-of-speech) are reduced to bags of
lemmas keeping only nouns, determiners and verbs, then topics are
estimated with a collapsed Gibbs sampler. The topic count is selected
by fitting candidate values and scoring held-out perplexity alongside
the mean document-topic entropy.

The sampler processes documents in lexicographic id order internally,
whatever the input order, so equal seeds give bit-identical estimates
and document order only permutes the rows of theta.
"""

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np
from numba import njit

POS_TAGS = frozenset(
    {"noun", "verb", "det", "adj", "adv", "pron", "adp", "conj", "num", "intj", "part", "other"}
)
DEFAULT_KEEP_POS = ("noun", "det", "verb")

DEFAULT_ITERATIONS = 1000
DEFAULT_BURN_IN = 200
DEFAULT_THINNING = 10
DEFAULT_ETA = 0.01


class Token(NamedTuple):
    surface: str
    lemma: str
    pos: str


@dataclass
class TokenStream:
    article_id: str
    tokens: list[Token]


# ---------------------------------------------------------------------------
# token-stream files and the fallback tagger

def read_token_stream_file(path) -> list[list[Token]]:
    """Parse a token-stream file: surface<TAB>lemma<TAB>pos, one token
    per line, blank line between documents."""
    documents = []
    current: list[Token] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            if current:
                documents.append(current)
                current = []
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
        surface, lemma, pos = (p.strip() for p in parts)
        if not lemma:
            raise ValueError(f"{path}:{lineno}: empty lemma")
        if pos not in POS_TAGS:
            raise ValueError(f"{path}:{lineno}: unknown pos tag {pos!r}")
        current.append(Token(surface, lemma, pos))
    if current:
        documents.append(current)
    return documents


def write_token_stream_file(path, documents) -> None:
    lines = []
    for i, doc in enumerate(documents):
        if i:
            lines.append("")
        for token in doc:
            lines.append(f"{token.surface}\t{token.lemma}\t{token.pos}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@lru_cache(maxsize=None)
def _lexicon(language: str) -> dict:
    name = f"pos_lexicon_{language}.tsv"
    try:
        text = resources.files("corposcope.data").joinpath(name).read_text("utf-8")
    except FileNotFoundError:
        return {}
    out = {}
    for line in text.splitlines():
        if line.strip():
            lemma, pos = line.split("\t")
            out[lemma] = pos
    return out


_WORD = re.compile(r"[^\W_]+", re.UNICODE)


def tag_text(text: str, language: str = "en") -> list[Token]:
    """Lexicon-backed fallback tagger for test fixtures and demos.

    Production corpora are expected to ship pre-annotated token-stream
    files; this tagger only knows the bundled lexicon, maps plural
    forms onto their singular lemma, and tags everything else 'other'.
    """
    lexicon = _lexicon(language)
    tokens = []
    for surface in _WORD.findall(text):
        lower = surface.lower()
        if lower in lexicon:
            lemma = lower
        elif lower.endswith("ies") and lower[:-3] + "y" in lexicon:
            lemma = lower[:-3] + "y"
        elif lower.endswith("s") and lower[:-1] in lexicon:
            lemma = lower[:-1]
        elif lower + "r" in lexicon:  # French -er verbs, 3rd person singular
            lemma = lower + "r"
        else:
            tokens.append(Token(surface, lower, "other"))
            continue
        tokens.append(Token(surface, lemma, lexicon[lemma]))
    return tokens


def load_fulltexts(corpus, base_dir) -> list[TokenStream]:
    """Token streams for every article carrying a fulltext reference.

    Relative references resolve against ``base_dir``; a file holding
    several blank-line-separated documents is concatenated into one
    stream for its article.
    """
    base = Path(base_dir)
    streams = []
    for art_id in sorted(corpus.articles):
        ref = corpus.articles[art_id].fulltext_ref
        if not ref:
            continue
        path = Path(ref)
        if not path.is_absolute():
            path = base / path
        documents = read_token_stream_file(path)
        tokens = [token for doc in documents for token in doc]
        streams.append(TokenStream(article_id=art_id, tokens=tokens))
    return streams


# ---------------------------------------------------------------------------
# bag-of-words construction and tfidf

@dataclass
class DocumentTermMatrix:
    doc_ids: list[str]
    vocabulary: list[str]
    counts: np.ndarray  # D x V, int64
    excluded: list[str] = field(default_factory=list)
    language: Optional[str] = None


def preprocess(fulltexts, language: Optional[str] = None, keep_pos=DEFAULT_KEEP_POS) -> DocumentTermMatrix:
    """Bags of lemmas from annotated streams, filtered by part of speech.

    Documents with no retained token are excluded and listed on the
    result. ``keep_pos`` defaults to nouns, determiners and verbs; pass
    ("noun", "verb") to drop determiners.
    """
    keep = set(keep_pos)
    bags = []
    excluded = []
    seen = set()
    for stream in fulltexts:
        if stream.article_id in seen:
            raise ValueError(f"duplicate document id {stream.article_id!r}")
        seen.add(stream.article_id)
        lemmas = Counter(t.lemma for t in stream.tokens if t.pos in keep)
        if not lemmas:
            excluded.append(stream.article_id)
        else:
            bags.append((stream.article_id, lemmas))
    if not bags:
        raise ValueError("no document retained any token after part-of-speech filtering")
    vocabulary = sorted({lemma for _, bag in bags for lemma in bag})
    index = {lemma: v for v, lemma in enumerate(vocabulary)}
    counts = np.zeros((len(bags), len(vocabulary)), dtype=np.int64)
    for d, (_, bag) in enumerate(bags):
        for lemma, c in bag.items():
            counts[d, index[lemma]] = c
    return DocumentTermMatrix(
        doc_ids=[doc_id for doc_id, _ in bags],
        vocabulary=vocabulary,
        counts=counts,
        excluded=excluded,
        language=language,
    )


def tfidf(counts: np.ndarray) -> np.ndarray:
    """Term frequency times log inverse document frequency (natural log).

    Terms present in every document weigh exactly zero.
    """
    counts = np.asarray(counts)
    if counts.size == 0:
        raise ValueError("empty document-term matrix")
    n_docs = counts.shape[0]
    df = (counts > 0).sum(axis=0)
    with np.errstate(divide="ignore"):
        idf = np.where(df > 0, np.log(n_docs / np.maximum(df, 1)), 0.0)
    return counts * idf


# ---------------------------------------------------------------------------
# collapsed Gibbs sampler

@njit(cache=True)
def _gibbs_sweep(doc_ix, word_ix, z, n_dk, n_kv, n_k, alpha, eta, uniforms, cumulative):
    n_topics = n_k.shape[0]
    v_eta = eta * n_kv.shape[1]
    for t in range(doc_ix.shape[0]):
        d = doc_ix[t]
        w = word_ix[t]
        k = z[t]
        n_dk[d, k] -= 1
        n_kv[k, w] -= 1
        n_k[k] -= 1
        total = 0.0
        for kk in range(n_topics):
            p = (n_kv[kk, w] + eta) / (n_k[kk] + v_eta) * (n_dk[d, kk] + alpha[kk])
            total += p
            cumulative[kk] = total
        u = uniforms[t] * total
        k_new = 0
        while k_new < n_topics - 1 and cumulative[k_new] < u:
            k_new += 1
        z[t] = k_new
        n_dk[d, k_new] += 1
        n_kv[k_new, w] += 1
        n_k[k_new] += 1


@dataclass
class TopicModelParams:
    """Fitted LDA parameters plus the sampler configuration that made them."""

    K: int
    alpha: np.ndarray          # K
    beta: np.ndarray           # K x V, rows sum to 1
    theta: np.ndarray          # D x K, rows sum to 1
    z_assignments: np.ndarray  # final-sweep topic per token
    epsilon: float             # mean document length (generative only)
    seed: int
    iterations: int
    burn_in: int
    thinning: int
    eta: float
    doc_ids: list[str]
    vocabulary: list[str]

    def top_words(self, m: int = 20) -> list[list[tuple[str, float]]]:
        out = []
        for k in range(self.K):
            order = np.argsort(-self.beta[k])[:m]
            out.append([(self.vocabulary[v], float(self.beta[k, v])) for v in order])
        return out


def fit_lda(
    matrix: DocumentTermMatrix,
    K: int,
    seed: int,
    iterations: int = DEFAULT_ITERATIONS,
    burn_in: int = DEFAULT_BURN_IN,
    thinning: int = DEFAULT_THINNING,
    alpha: Optional[float] = None,
    eta: float = DEFAULT_ETA,
) -> TopicModelParams:
    """Collapsed Gibbs estimation of LDA with symmetric priors.

    ``alpha`` defaults to 50/K. Point estimates of beta and theta are
    averages over post-burn-in samples taken every ``thinning`` sweeps.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    n_docs, n_words = matrix.counts.shape
    if K > n_words:
        raise ValueError(f"K={K} exceeds dictionary size {n_words}")
    if iterations <= burn_in:
        raise ValueError(f"iterations={iterations} below burn-in {burn_in}")

    alpha_val = (50.0 / K) if alpha is None else float(alpha)
    alpha_vec = np.full(K, alpha_val)

    # canonical document order: lexicographic by id
    order = sorted(range(n_docs), key=lambda d: matrix.doc_ids[d])
    counts = matrix.counts[order]

    doc_ix_parts = []
    word_ix_parts = []
    for d in range(n_docs):
        row = counts[d]
        nz = np.nonzero(row)[0]
        reps = row[nz]
        word_ix_parts.append(np.repeat(nz, reps))
        doc_ix_parts.append(np.full(int(reps.sum()), d, dtype=np.int64))
    doc_ix = np.concatenate(doc_ix_parts)
    word_ix = np.concatenate(word_ix_parts).astype(np.int64)
    n_tokens = doc_ix.shape[0]
    if n_tokens == 0:
        raise ValueError("document-term matrix has no tokens")

    rng = np.random.default_rng(seed)
    z = rng.integers(0, K, n_tokens).astype(np.int64)
    n_dk = np.zeros((n_docs, K), dtype=np.int64)
    n_kv = np.zeros((K, n_words), dtype=np.int64)
    n_k = np.zeros(K, dtype=np.int64)
    np.add.at(n_dk, (doc_ix, z), 1)
    np.add.at(n_kv, (z, word_ix), 1)
    np.add.at(n_k, z, 1)

    cumulative = np.empty(K)
    beta_acc = np.zeros((K, n_words))
    theta_acc = np.zeros((n_docs, K))
    samples = 0
    doc_len = counts.sum(axis=1)
    for sweep in range(1, iterations + 1):
        uniforms = rng.random(n_tokens)
        _gibbs_sweep(doc_ix, word_ix, z, n_dk, n_kv, n_k, alpha_vec, eta, uniforms, cumulative)
        if sweep > burn_in and (sweep - burn_in) % thinning == 0:
            beta_sample = (n_kv + eta) / (n_k + eta * n_words)[:, None]
            theta_sample = (n_dk + alpha_vec) / (doc_len + alpha_vec.sum())[:, None]
            beta_acc += beta_sample
            theta_acc += theta_sample
            samples += 1
    if samples == 0:
        raise ValueError("no post-burn-in samples; raise iterations or lower thinning")

    beta = beta_acc / samples
    beta /= beta.sum(axis=1, keepdims=True)
    theta = theta_acc / samples
    theta /= theta.sum(axis=1, keepdims=True)

    # undo the canonical reordering: theta rows must follow input order
    inverse = np.empty(n_docs, dtype=np.int64)
    inverse[np.asarray(order)] = np.arange(n_docs)
    theta = theta[inverse]

    return TopicModelParams(
        K=K,
        alpha=alpha_vec,
        beta=beta,
        theta=theta,
        z_assignments=z,
        epsilon=float(doc_len.mean()),
        seed=seed,
        iterations=iterations,
        burn_in=burn_in,
        thinning=thinning,
        eta=eta,
        doc_ids=list(matrix.doc_ids),
        vocabulary=list(matrix.vocabulary),
    )


@njit(cache=True)
def _fold_in_sweep(doc_ix, word_ix, z, n_dk, beta, alpha, uniforms, cumulative):
    n_topics = beta.shape[0]
    for t in range(doc_ix.shape[0]):
        d = doc_ix[t]
        w = word_ix[t]
        k = z[t]
        n_dk[d, k] -= 1
        total = 0.0
        for kk in range(n_topics):
            p = beta[kk, w] * (n_dk[d, kk] + alpha[kk])
            total += p
            cumulative[kk] = total
        u = uniforms[t] * total
        k_new = 0
        while k_new < n_topics - 1 and cumulative[k_new] < u:
            k_new += 1
        z[t] = k_new
        n_dk[d, k_new] += 1


def fold_in_predictive(
    params: "TopicModelParams", counts: np.ndarray, seed: int = 0,
    sweeps: int = 60, burn: int = 20,
) -> np.ndarray:
    """Posterior-averaged word predictive for unseen documents.

    Runs Gibbs with topics fixed at the fitted beta and averages the
    per-sweep theta-mixture predictive, so the posterior uncertainty of
    theta is priced in (a plug-in point estimate would let extra topics
    overfit short documents for free).
    """
    counts = np.asarray(counts)
    n_docs = counts.shape[0]
    rng = np.random.default_rng(seed)
    doc_parts = []
    word_parts = []
    for d in range(n_docs):
        nz = np.nonzero(counts[d])[0]
        reps = counts[d][nz]
        word_parts.append(np.repeat(nz, reps))
        doc_parts.append(np.full(int(reps.sum()), d, dtype=np.int64))
    doc_ix = np.concatenate(doc_parts)
    word_ix = np.concatenate(word_parts).astype(np.int64)
    z = rng.integers(0, params.K, doc_ix.shape[0]).astype(np.int64)
    n_dk = np.zeros((n_docs, params.K), dtype=np.int64)
    np.add.at(n_dk, (doc_ix, z), 1)
    cumulative = np.empty(params.K)
    lengths = counts.sum(axis=1)
    predictive = np.zeros((n_docs, params.beta.shape[1]))
    samples = 0
    for sweep in range(sweeps):
        uniforms = rng.random(doc_ix.shape[0])
        _fold_in_sweep(doc_ix, word_ix, z, n_dk, params.beta, params.alpha, uniforms, cumulative)
        if sweep >= burn:
            theta = (n_dk + params.alpha) / (lengths + params.alpha.sum())[:, None]
            predictive += theta @ params.beta
            samples += 1
    return predictive / samples


def perplexity(beta: np.ndarray, theta: np.ndarray, counts: np.ndarray) -> float:
    """exp(-mean per-token log likelihood) of counts under (theta, beta)."""
    counts = np.asarray(counts, dtype=float)
    mixture = np.asarray(theta) @ np.asarray(beta)
    mask = counts > 0
    log_lik = float((counts[mask] * np.log(np.maximum(mixture[mask], 1e-300))).sum())
    n_tokens = float(counts.sum())
    if n_tokens == 0:
        raise ValueError("no tokens to evaluate")
    return math.exp(-log_lik / n_tokens)


def split_for_completion(counts: np.ndarray):
    """Deterministically halve each document's tokens for completion scoring.

    Tokens are expanded in vocabulary order and alternate between the
    estimation half and the evaluation half.
    """
    counts = np.asarray(counts)
    estimation = np.zeros_like(counts)
    evaluation = np.zeros_like(counts)
    for d in range(counts.shape[0]):
        position = 0
        for v in np.nonzero(counts[d])[0]:
            c = int(counts[d, v])
            # tokens at even global positions go to estimation
            n_est = (c + (position % 2 == 0)) // 2
            estimation[d, v] = n_est
            evaluation[d, v] = c - n_est
            position += c
    return estimation, evaluation


def heldout_perplexity(params: TopicModelParams, counts: np.ndarray, seed: int = 0) -> float:
    """Document-completion perplexity on held-out documents.

    Topic mixtures are folded in on one half of each document's tokens
    (Bayesian averaging over the theta posterior) and the likelihood is
    scored on the complementary half.
    """
    estimation, evaluation = split_for_completion(counts)
    if evaluation.sum() == 0:
        raise ValueError("held-out documents too short for completion scoring")
    predictive = fold_in_predictive(params, estimation, seed=seed)
    mask = evaluation > 0
    log_lik = float(
        (evaluation[mask] * np.log(np.maximum(predictive[mask], 1e-300))).sum()
    )
    return math.exp(-log_lik / float(evaluation.sum()))


def mean_theta_entropy(theta: np.ndarray) -> float:
    """Mean per-document entropy (nats) of topic mixtures."""
    theta = np.asarray(theta)
    safe = np.maximum(theta, 1e-300)
    return float(-(theta * np.log(safe)).sum(axis=1).mean())


@dataclass
class ModelSelectionReport:
    candidate_Ks: list[int]
    replications: int
    entropy: dict[int, float]
    perplexity: dict[int, float]
    entropy_sd: dict[int, float]
    perplexity_sd: dict[int, float]
    chosen_K: int
    heldout_fraction: float
    entropy_basis: str = "mean per-document entropy of fitted theta rows"
    perplexity_basis: str = (
        "document completion: Bayesian fold-in on one half of the tokens, "
        "scored on the other half"
    )

    def to_json(self) -> dict:
        return {
            "candidate_Ks": self.candidate_Ks,
            "replications": self.replications,
            "entropy": {str(k): v for k, v in self.entropy.items()},
            "perplexity": {str(k): v for k, v in self.perplexity.items()},
            "entropy_sd": {str(k): v for k, v in self.entropy_sd.items()},
            "perplexity_sd": {str(k): v for k, v in self.perplexity_sd.items()},
            "chosen_K": self.chosen_K,
            "heldout_fraction": self.heldout_fraction,
            "entropy_basis": self.entropy_basis,
            "perplexity_basis": self.perplexity_basis,
        }


def select_topic_count(
    matrix: DocumentTermMatrix,
    candidates,
    replications: int,
    seed: int,
    iterations: int = DEFAULT_ITERATIONS,
    burn_in: int = DEFAULT_BURN_IN,
    thinning: int = DEFAULT_THINNING,
    alpha: Optional[float] = None,
    eta: float = DEFAULT_ETA,
    heldout_fraction: float = 0.1,
) -> ModelSelectionReport:
    """Score candidate topic counts by held-out perplexity and entropy.

    Each replication redraws the held-out split and the sampler seed
    from a (seed, candidate, replication)-derived stream. The chosen K
    minimizes mean perplexity; entropy is reported alongside for the
    analyst.
    """
    candidates = list(candidates)
    if not candidates:
        raise ValueError("no candidate topic counts")
    if replications < 1:
        raise ValueError("replications must be >= 1")
    n_docs = len(matrix.doc_ids)
    n_held = max(1, int(round(heldout_fraction * n_docs)))
    if n_held >= n_docs:
        raise ValueError("held-out split would consume every document")

    perp: dict[int, list[float]] = {k: [] for k in candidates}
    ent: dict[int, list[float]] = {k: [] for k in candidates}
    for ki, K in enumerate(candidates):
        for rep in range(replications):
            rng = np.random.default_rng([seed, ki, rep])
            held = np.sort(rng.choice(n_docs, size=n_held, replace=False))
            held_set = set(held.tolist())
            train_idx = [d for d in range(n_docs) if d not in held_set]
            train = DocumentTermMatrix(
                doc_ids=[matrix.doc_ids[d] for d in train_idx],
                vocabulary=matrix.vocabulary,
                counts=matrix.counts[train_idx],
                language=matrix.language,
            )
            params = fit_lda(
                train,
                K,
                seed=int(rng.integers(2**63)),
                iterations=iterations,
                burn_in=burn_in,
                thinning=thinning,
                alpha=alpha,
                eta=eta,
            )
            fold_seed = int(rng.integers(2**63))
            perp[K].append(heldout_perplexity(params, matrix.counts[held], seed=fold_seed))
            ent[K].append(mean_theta_entropy(params.theta))

    mean_perp = {k: float(np.mean(v)) for k, v in perp.items()}
    chosen = min(candidates, key=lambda k: (mean_perp[k], k))
    return ModelSelectionReport(
        candidate_Ks=candidates,
        replications=replications,
        entropy={k: float(np.mean(v)) for k, v in ent.items()},
        perplexity=mean_perp,
        entropy_sd={k: float(np.std(v)) for k, v in ent.items()},
        perplexity_sd={k: float(np.std(v)) for k, v in perp.items()},
        chosen_K=chosen,
        heldout_fraction=heldout_fraction,
    )


@dataclass
class TopicEvolution:
    threshold: float
    years: list[int]
    counts: np.ndarray  # len(years) x K

    def to_json(self) -> dict:
        return {
            "threshold": self.threshold,
            "years": self.years,
            "counts": self.counts.astype(int).tolist(),
        }


def topic_evolution(params: TopicModelParams, corpus, threshold: float) -> TopicEvolution:
    """Documents addressing each topic per publication year.

    A document addresses topic k when its theta share reaches the
    threshold.
    """
    years_by_doc = []
    for doc_id in params.doc_ids:
        article = corpus.articles.get(doc_id)
        if article is None:
            raise KeyError(f"model document {doc_id!r} not in corpus")
        years_by_doc.append(article.year)
    years = sorted(set(years_by_doc))
    year_index = {y: i for i, y in enumerate(years)}
    counts = np.zeros((len(years), params.K), dtype=np.int64)
    addressed = params.theta >= threshold
    for d, year in enumerate(years_by_doc):
        counts[year_index[year]] += addressed[d]
    return TopicEvolution(threshold=threshold, years=years, counts=counts)


def model_to_json(params: TopicModelParams, top_m: int = 20,
                  selection: Optional[ModelSelectionReport] = None) -> dict:
    doc = {
        "K": params.K,
        "alpha": float(params.alpha[0]),
        "eta": params.eta,
        "seed": params.seed,
        "iterations": params.iterations,
        "burn_in": params.burn_in,
        "thinning": params.thinning,
        "epsilon": params.epsilon,
        "topics": [
            [{"word": w, "probability": p} for w, p in topic]
            for topic in params.top_words(top_m)
        ],
        "theta": {
            doc_id: [float(v) for v in row]
            for doc_id, row in zip(params.doc_ids, params.theta)
        },
    }
    if selection is not None:
        doc["selection"] = selection.to_json()
    return doc
