"""Corpus ingestion, validation and geography flows.

The corpus is the root input of every analysis: articles with declared
keywords and country tags, plus the citation records surrounding them.
A loaded :class:`Corpus` is immutable by convention; nothing in this
package mutates it after ingestion.
"""

import csv
import hashlib
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np

SNAPSHOT_FORMAT_VERSION = 1

MIN_YEAR = 1900

COUNTRY_RE = re.compile(r"^[A-Z]{2}$")

# ISO 3166-1 alpha-2, officially assigned. Codes outside this set but
# matching [A-Z]{2} are kept with a warning (user-assigned ranges exist).
ISO_3166_ALPHA2 = frozenset(
    "AD AE AF AG AI AL AM AO AQ AR AS AT AU AW AX AZ BA BB BD BE BF BG BH BI BJ "
    "BL BM BN BO BQ BR BS BT BV BW BY BZ CA CC CD CF CG CH CI CK CL CM CN CO CR "
    "CU CV CW CX CY CZ DE DJ DK DM DO DZ EC EE EG EH ER ES ET FI FJ FK FM FO FR "
    "GA GB GD GE GF GG GH GI GL GM GN GP GQ GR GS GT GU GW GY HK HM HN HR HT HU "
    "ID IE IL IM IN IO IQ IR IS IT JE JM JO JP KE KG KH KI KM KN KP KR KW KY KZ "
    "LA LB LC LI LK LR LS LT LU LV LY MA MC MD ME MF MG MH MK ML MM MN MO MP MQ "
    "MR MS MT MU MV MW MX MY MZ NA NC NE NF NG NI NL NO NP NR NU NZ OM PA PE PF "
    "PG PH PK PL PM PN PR PS PT PW PY QA RE RO RS RU RW SA SB SC SD SE SG SH SI "
    "SJ SK SL SM SN SO SR SS ST SV SX SY SZ TC TD TF TG TH TJ TK TL TM TN TO TR "
    "TT TV TW TZ UA UG UM US UY UZ VA VC VE VG VI VN VU WF WS YE YT ZA ZM ZW".split()
)


class CorpusError(ValueError):
    """Raised for fatal ingestion problems (malformed rows, duplicate ids)."""


@dataclass
class Article:
    """One corpus document.

    ``keywords`` are author-declared labels, already normalized to
    lowercase/trimmed form. ``authoring_countries`` is the declared
    affiliation country per article; ``studied_countries`` may be empty
    when no country is the focus of the study.
    """

    id: str
    year: int
    language: str
    keywords: list[str]
    authoring_countries: list[str]
    studied_countries: list[str]
    abstract: Optional[str] = None
    fulltext_ref: Optional[str] = None


@dataclass
class CitationRecord:
    """One directed citation edge in the depth-2 neighborhood.

    ``depth`` is the declared hop count from the seed corpus (1 or 2).
    ``abstract``, when present, describes the deeper endpoint of the
    edge, i.e. the article the record pulled into the neighborhood.
    """

    citing_id: str
    cited_id: str
    depth: int
    abstract: Optional[str] = None


@dataclass
class Provenance:
    source_digests: dict[str, str] = field(default_factory=dict)
    ingested_at: str = ""
    warnings: list[str] = field(default_factory=list)


@dataclass
class Corpus:
    articles: dict[str, Article]
    citations: list[CitationRecord]
    provenance: Provenance

    @property
    def article_ids(self) -> list[str]:
        return list(self.articles)


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def _split_list(raw: str) -> list[str]:
    return [part.strip() for part in raw.split("|") if part.strip()]


def _normalize_countries(raw: str, where: str, warnings: list[str]) -> list[str]:
    """Uppercase, validate against [A-Z]{2}, warn on unknown ISO codes.

    Codes that do not even match the two-letter shape are dropped (the
    Article invariant forbids storing them); codes with a valid shape
    but outside the ISO assignment are kept so user-assigned regions
    survive, with a warning either way.
    """
    out = []
    for code in _split_list(raw):
        code = code.upper()
        if not COUNTRY_RE.match(code):
            warnings.append(f"{where}: dropped malformed country code {code!r}")
            continue
        if code not in ISO_3166_ALPHA2:
            warnings.append(f"{where}: unknown country code {code!r}")
        out.append(code)
    return out


ARTICLE_HEADER = [
    "id",
    "year",
    "language",
    "keywords",
    "authoring_countries",
    "studied_countries",
    "abstract",
    "fulltext_ref",
]

CITATION_HEADER = ["citing_id", "cited_id", "depth", "abstract"]


def _parse_article_row(row: dict, path: str, line: int, warnings: list[str]) -> Article:
    where = f"{path}:{line}"

    art_id = (row.get("id") or "").strip()
    if not art_id:
        raise CorpusError(f"{where}: field 'id': empty article id")

    raw_year = (row.get("year") or "").strip()
    try:
        year = int(raw_year)
    except ValueError:
        raise CorpusError(f"{where}: field 'year': not an integer: {raw_year!r}") from None
    current_year = datetime.now(timezone.utc).year
    if not MIN_YEAR <= year <= current_year:
        raise CorpusError(
            f"{where}: field 'year': {year} outside [{MIN_YEAR}, {current_year}]"
        )

    language = (row.get("language") or "").strip().lower()
    if not re.match(r"^[a-z]{2}$", language):
        raise CorpusError(f"{where}: field 'language': not a 2-letter code: {language!r}")

    keywords = sorted({kw.lower() for kw in _split_list(row.get("keywords") or "")})

    abstract = (row.get("abstract") or "").strip() or None
    fulltext_ref = (row.get("fulltext_ref") or "").strip() or None

    return Article(
        id=art_id,
        year=year,
        language=language,
        keywords=keywords,
        authoring_countries=_normalize_countries(
            row.get("authoring_countries") or "", f"{where}: authoring_countries", warnings
        ),
        studied_countries=_normalize_countries(
            row.get("studied_countries") or "", f"{where}: studied_countries", warnings
        ),
        abstract=abstract,
        fulltext_ref=fulltext_ref,
    )


def _parse_citation_row(row: dict, path: str, line: int) -> CitationRecord:
    where = f"{path}:{line}"
    citing = (row.get("citing_id") or "").strip()
    cited = (row.get("cited_id") or "").strip()
    if not citing or not cited:
        raise CorpusError(f"{where}: field 'citing_id/cited_id': empty endpoint")
    if citing == cited:
        raise CorpusError(f"{where}: field 'cited_id': self-citation {citing!r}")
    raw_depth = (row.get("depth") or "").strip()
    try:
        depth = int(raw_depth)
    except ValueError:
        raise CorpusError(f"{where}: field 'depth': not an integer: {raw_depth!r}") from None
    if depth not in (1, 2):
        raise CorpusError(f"{where}: field 'depth': {depth} not in {{1, 2}}")
    abstract = (row.get("abstract") or "").strip() or None
    return CitationRecord(citing_id=citing, cited_id=cited, depth=depth, abstract=abstract)


def load_corpus(articles_path, citations_path=None) -> Corpus:
    """Load and validate a corpus from its CSV exports.

    ``articles_path`` must carry the canonical article header; list
    fields use ``|`` as internal separator. ``citations_path`` is
    optional. Non-fatal issues (unknown country codes) are collected as
    warnings on the corpus provenance.
    """
    articles_path = Path(articles_path)
    warnings: list[str] = []
    articles: dict[str, Article] = {}
    duplicates: list[str] = []

    with articles_path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ARTICLE_HEADER:
            raise CorpusError(
                f"{articles_path}: bad header {reader.fieldnames!r}, expected {ARTICLE_HEADER}"
            )
        for line, row in enumerate(reader, start=2):
            article = _parse_article_row(row, str(articles_path), line, warnings)
            if article.fulltext_ref and not Path(article.fulltext_ref).is_absolute():
                # anchor to the articles file so the corpus snapshot is portable
                article.fulltext_ref = str((articles_path.parent / article.fulltext_ref).resolve())
            if article.id in articles:
                duplicates.append(article.id)
            else:
                articles[article.id] = article

    if duplicates:
        raise CorpusError(
            f"{articles_path}: duplicate article ids: {sorted(set(duplicates))}"
        )
    if not articles:
        raise CorpusError(f"{articles_path}: no articles")

    citations: list[CitationRecord] = []
    digests = {str(articles_path): _sha256_file(articles_path)}
    if citations_path is not None:
        citations_path = Path(citations_path)
        seen_pairs = set()
        with citations_path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != CITATION_HEADER:
                raise CorpusError(
                    f"{citations_path}: bad header {reader.fieldnames!r}, expected {CITATION_HEADER}"
                )
            for line, row in enumerate(reader, start=2):
                record = _parse_citation_row(row, str(citations_path), line)
                pair = (record.citing_id, record.cited_id)
                if pair in seen_pairs:
                    raise CorpusError(
                        f"{citations_path}:{line}: duplicate citation pair {pair}"
                    )
                seen_pairs.add(pair)
                citations.append(record)
        digests[str(citations_path)] = _sha256_file(citations_path)

    provenance = Provenance(
        source_digests=digests,
        ingested_at=datetime.now(timezone.utc).isoformat(),
        warnings=warnings,
    )
    return Corpus(articles=articles, citations=citations, provenance=provenance)


@dataclass
class CorpusStats:
    article_count: int
    authoring_country_count: int
    studied_country_count: int
    citations_by_depth: dict[int, int]
    citations_received: int
    cited_by_corpus: int
    articles_per_year: dict[int, int]

    def to_json(self) -> dict:
        return {
            "article_count": self.article_count,
            "authoring_country_count": self.authoring_country_count,
            "studied_country_count": self.studied_country_count,
            "citations_by_depth": {str(k): v for k, v in sorted(self.citations_by_depth.items())},
            "citations_received": self.citations_received,
            "cited_by_corpus": self.cited_by_corpus,
            "articles_per_year": {str(k): v for k, v in sorted(self.articles_per_year.items())},
        }


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Exact corpus summary counts.

    ``citations_received`` counts records whose cited endpoint is a
    seed article (incoming citations); ``cited_by_corpus`` counts
    records whose citing endpoint is a seed article (references made
    by the corpus).
    """
    seed_ids = set(corpus.articles)
    by_depth = Counter(rec.depth for rec in corpus.citations)
    received = sum(1 for rec in corpus.citations if rec.cited_id in seed_ids)
    outgoing = sum(1 for rec in corpus.citations if rec.citing_id in seed_ids)
    per_year = Counter(a.year for a in corpus.articles.values())
    authoring = {c for a in corpus.articles.values() for c in a.authoring_countries}
    studied = {c for a in corpus.articles.values() for c in a.studied_countries}
    return CorpusStats(
        article_count=len(corpus.articles),
        authoring_country_count=len(authoring),
        studied_country_count=len(studied),
        citations_by_depth=dict(by_depth),
        citations_received=received,
        cited_by_corpus=outgoing,
        articles_per_year=dict(per_year),
    )


@dataclass
class GeoFlowMatrix:
    """Square origin -> studied country flow matrix.

    ``flows[o, s]`` counts articles authored from country ``o`` that
    study country ``s``; an article with several tags on either side
    contributes to every qualifying pair. ``reciprocal[o, s]`` is set
    iff both directions carry flow.
    """

    countries: list[str]
    flows: np.ndarray
    reciprocal: np.ndarray

    def entry(self, origin: str, studied: str) -> int:
        i = self.countries.index(origin)
        j = self.countries.index(studied)
        return int(self.flows[i, j])

    def to_json(self) -> dict:
        return {
            "countries": self.countries,
            "flows": self.flows.astype(int).tolist(),
            "reciprocal": self.reciprocal.astype(bool).tolist(),
        }


def geo_flow_matrix(corpus: Corpus) -> GeoFlowMatrix:
    """Origin/destination flows over country codes.

    Articles with an empty studied set are retained in the corpus but
    contribute no flow.
    """
    codes = sorted(
        {c for a in corpus.articles.values() for c in a.authoring_countries}
        | {c for a in corpus.articles.values() for c in a.studied_countries}
    )
    index = {c: i for i, c in enumerate(codes)}
    flows = np.zeros((len(codes), len(codes)), dtype=np.int64)
    for article in corpus.articles.values():
        if not article.studied_countries:
            continue
        for origin in article.authoring_countries:
            for studied in article.studied_countries:
                flows[index[origin], index[studied]] += 1
    reciprocal = (flows > 0) & (flows.T > 0)
    return GeoFlowMatrix(countries=codes, flows=flows, reciprocal=reciprocal)


def write_snapshot(corpus: Corpus, path) -> None:
    """Serialize the corpus to its canonical JSON snapshot."""
    doc = {
        "format_version": SNAPSHOT_FORMAT_VERSION,
        "articles": [
            {
                "id": a.id,
                "year": a.year,
                "language": a.language,
                "keywords": a.keywords,
                "authoring_countries": a.authoring_countries,
                "studied_countries": a.studied_countries,
                "abstract": a.abstract,
                "fulltext_ref": a.fulltext_ref,
            }
            for a in corpus.articles.values()
        ],
        "citations": [
            {
                "citing_id": c.citing_id,
                "cited_id": c.cited_id,
                "depth": c.depth,
                "abstract": c.abstract,
            }
            for c in corpus.citations
        ],
        "provenance": {
            "source_digests": corpus.provenance.source_digests,
            "ingested_at": corpus.provenance.ingested_at,
            "warnings": corpus.provenance.warnings,
        },
    }
    Path(path).write_text(
        json.dumps(doc, ensure_ascii=False, sort_keys=True, indent=1) + "\n",
        encoding="utf-8",
    )


def read_snapshot(path) -> Corpus:
    """Load a corpus back from :func:`write_snapshot` output."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    version = doc.get("format_version")
    if version != SNAPSHOT_FORMAT_VERSION:
        raise CorpusError(f"{path}: unsupported snapshot format_version {version!r}")
    articles = {}
    for raw in doc["articles"]:
        article = Article(
            id=raw["id"],
            year=raw["year"],
            language=raw["language"],
            keywords=list(raw["keywords"]),
            authoring_countries=list(raw["authoring_countries"]),
            studied_countries=list(raw["studied_countries"]),
            abstract=raw.get("abstract"),
            fulltext_ref=raw.get("fulltext_ref"),
        )
        if article.id in articles:
            raise CorpusError(f"{path}: duplicate article ids: [{article.id!r}]")
        articles[article.id] = article
    if not articles:
        raise CorpusError(f"{path}: no articles")
    citations = [
        CitationRecord(
            citing_id=raw["citing_id"],
            cited_id=raw["cited_id"],
            depth=raw["depth"],
            abstract=raw.get("abstract"),
        )
        for raw in doc["citations"]
    ]
    prov = doc.get("provenance", {})
    provenance = Provenance(
        source_digests=dict(prov.get("source_digests", {})),
        ingested_at=prov.get("ingested_at", ""),
        warnings=list(prov.get("warnings", [])),
    )
    return Corpus(articles=articles, citations=citations, provenance=provenance)


def corpus_digest(corpus: Corpus) -> str:
    """Stable content digest of articles + citations (not timestamps).

    Used to key analysis snapshots: two ingestions of the same source
    files produce the same digest.
    """
    h = hashlib.sha256()
    for a in sorted(corpus.articles.values(), key=lambda x: x.id):
        h.update(
            json.dumps(
                [a.id, a.year, a.language, a.keywords, a.authoring_countries,
                 a.studied_countries, a.abstract, a.fulltext_ref],
                ensure_ascii=False,
            ).encode("utf-8")
        )
    for c in sorted(corpus.citations, key=lambda x: (x.citing_id, x.cited_id)):
        h.update(
            json.dumps([c.citing_id, c.cited_id, c.depth, c.abstract], ensure_ascii=False).encode(
                "utf-8"
            )
        )
    return h.hexdigest()
