"""Article ingestion, cleaning, sentence segmentation, chunking, and corpus statistics."""

from __future__ import annotations

import logging
import statistics
from dataclasses import dataclass
from datetime import date
from importlib import resources
from typing import Iterable, Mapping

from .utils import (
    ConfigurationError,
    FramelensError,
    collapse_whitespace,
    read_jsonl,
    whitespace_tokens,
)

logger = logging.getLogger(__name__)

_SENTENCE_TERMINALS = ".!?"
_OPENING_QUOTES = "\"'“‘"

# Characters that may be left over between a removed subheadline prefix and the
# remainder of the body (separator punctuation plus whitespace).
_PREFIX_SEPARATORS = " \t\r\n.,:;|-–—"


class ArticleValidationError(FramelensError):
    """A raw article record failed validation; `reason` is the diagnostic."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class RelevanceParseError(FramelensError):
    """A relevance response did not follow the expected line format."""

    def __init__(self, message: str, raw: str):
        super().__init__(message)
        self.raw = raw


@dataclass(frozen=True)
class Article:
    id: str
    url: str
    title: str
    subheadline: str
    body: str
    full_text: str
    publish_date: date
    source: str


@dataclass(frozen=True)
class Sentence:
    index: int
    text: str
    char_span: tuple[int, int]


@dataclass(frozen=True)
class Chunk:
    article_id: str
    index: int
    word_span: tuple[int, int]
    text: str


@dataclass(frozen=True)
class CorpusStats:
    article_count: int
    sentence_count: int
    mean_words: float
    median_words: float
    std_words: float
    min_words: int
    max_words: int


def _load_default_abbreviations() -> frozenset[str]:
    text = resources.files("framelens.data").joinpath("abbreviations.txt").read_text("utf-8")
    entries = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.add(line)
    return frozenset(entries)


_DEFAULT_ABBREVIATIONS: frozenset[str] | None = None


def default_abbreviations() -> frozenset[str]:
    """Bundled abbreviation list used to suppress sentence boundaries."""
    global _DEFAULT_ABBREVIATIONS
    if _DEFAULT_ABBREVIATIONS is None:
        _DEFAULT_ABBREVIATIONS = _load_default_abbreviations()
    return _DEFAULT_ABBREVIATIONS


def _normalized_prefix_length(body: str, prefix: str) -> int:
    """Length of the leading slice of `body` that equals `prefix`.

    Comparison is case-insensitive and treats any whitespace run as a single
    separator. Returns -1 when `body` does not start with `prefix`, or when
    the match would end mid-word.
    """
    want = collapse_whitespace(prefix).lower()
    if not want:
        return -1
    i = 0
    n = len(body)
    for ch in want:
        if ch == " ":
            if i >= n or not body[i].isspace():
                return -1
            while i < n and body[i].isspace():
                i += 1
        else:
            if i >= n or body[i].lower() != ch:
                return -1
            i += 1
    if i < n and body[i].isalnum():
        return -1
    return i


def _dedupe_subheadline(body: str, subheadline: str) -> str:
    cut = _normalized_prefix_length(body, subheadline)
    if cut < 0:
        return body
    return body[cut:].lstrip(_PREFIX_SEPARATORS)


def clean_article(raw: Mapping[str, object]) -> Article:
    """Build a cleaned Article from a raw record.

    full_text joins title, subheadline, and body with newlines, skipping empty
    parts. When the body starts with the subheadline (case-insensitive, after
    whitespace normalization) the duplicated prefix is removed from the body.

    Raises ArticleValidationError for an empty title or a missing/unparseable
    publish date.
    """
    title = str(raw.get("title") or "").strip()
    if not title:
        raise ArticleValidationError("empty title")
    raw_date = raw.get("publish_date") or raw.get("date")
    if raw_date is None or str(raw_date).strip() == "":
        raise ArticleValidationError("missing publish_date")
    if isinstance(raw_date, date):
        publish_date = raw_date
    else:
        try:
            publish_date = date.fromisoformat(str(raw_date).strip())
        except ValueError:
            raise ArticleValidationError(f"unparseable publish_date {raw_date!r} (expected YYYY-MM-DD)") from None

    subheadline = str(raw.get("subheadline") or "").strip()
    body = str(raw.get("body") or "").strip()
    if subheadline and body:
        body = _dedupe_subheadline(body, subheadline)
    parts = [part for part in (title, subheadline, body) if part]
    return Article(
        id=str(raw.get("id") or "").strip(),
        url=str(raw.get("url") or "").strip(),
        title=title,
        subheadline=subheadline,
        body=body,
        full_text="\n".join(parts),
        publish_date=publish_date,
        source=str(raw.get("source") or "").strip(),
    )


def load_corpus(path) -> tuple[list[Article], list[dict]]:
    """Load a JSONL corpus file; invalid records are skipped, never dropped silently.

    Returns (articles, rejected) where each rejected entry is the raw record
    plus a `reason` field, matching the rejected-record log format.
    """
    articles: list[Article] = []
    rejected: list[dict] = []
    seen_ids: set[str] = set()
    for lineno, record in read_jsonl(path):
        try:
            article = clean_article(record)
            if not article.id:
                raise ArticleValidationError("missing id")
            if article.id in seen_ids:
                raise ArticleValidationError(f"duplicate article id {article.id!r}")
        except ArticleValidationError as exc:
            logger.warning("%s:%d: rejected record: %s", path, lineno, exc.reason)
            rejected.append({**record, "reason": exc.reason})
            continue
        seen_ids.add(article.id)
        articles.append(article)
    return articles, rejected


def _token_before(text: str, period_index: int) -> str:
    """The whitespace-delimited token ending at `period_index` (inclusive)."""
    start = period_index
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    token = text[start : period_index + 1]
    while token and not token[0].isalnum():
        token = token[1:]
    return token


def segment_sentences(full_text: str, abbreviations: frozenset[str] | None = None) -> list[Sentence]:
    """Deterministic rule-based sentence segmentation.

    A boundary is a '.', '?' or '!' followed by whitespace and then an
    uppercase letter, an opening quote, or a digit. A '.' boundary is
    suppressed when the token it terminates is a known abbreviation
    (e.g. "Mr.", "Rs."). Whitespace-only segments are dropped.
    """
    if abbreviations is None:
        abbreviations = default_abbreviations()
    n = len(full_text)
    boundaries: list[int] = []
    for i, ch in enumerate(full_text):
        if ch not in _SENTENCE_TERMINALS:
            continue
        j = i + 1
        if j >= n or not full_text[j].isspace():
            continue
        while j < n and full_text[j].isspace():
            j += 1
        if j >= n:
            continue
        follower = full_text[j]
        if not (follower in _OPENING_QUOTES or follower.isupper() or follower.isdigit()):
            continue
        if ch == "." and _token_before(full_text, i) in abbreviations:
            continue
        boundaries.append(i + 1)

    sentences: list[Sentence] = []
    segment_start = 0
    for end in [*boundaries, n]:
        start = segment_start
        while start < end and full_text[start].isspace():
            start += 1
        stop = end
        while stop > start and full_text[stop - 1].isspace():
            stop -= 1
        if stop > start:
            sentences.append(Sentence(index=len(sentences), text=full_text[start:stop], char_span=(start, stop)))
        segment_start = end
    return sentences


def chunk_words(
    full_text: str,
    size: int = 450,
    overlap: int = 50,
    min_chunk: int = 20,
    article_id: str = "",
) -> list[Chunk]:
    """Split text into overlapping word windows: [0, size), [size-overlap, ...).

    A trailing window shorter than `min_chunk` words is merged into the
    previous chunk; a text shorter than `min_chunk` yields a single chunk.
    Empty text yields no chunks.
    """
    if size <= overlap or overlap < 0:
        raise ConfigurationError(f"chunk size ({size}) must exceed overlap ({overlap})")
    if not 1 <= min_chunk <= size:
        raise ConfigurationError(f"min_chunk must be in [1, size], got {min_chunk}")

    spans: list[tuple[int, int]] = []
    char_spans: list[tuple[int, int]] = []
    pos = 0
    for token in full_text.split():
        start = full_text.index(token, pos)
        char_spans.append((start, start + len(token)))
        pos = start + len(token)
    total = len(char_spans)
    if total == 0:
        return []

    stride = size - overlap
    start = 0
    while True:
        end = min(start + size, total)
        spans.append((start, end))
        if end >= total:
            break
        start += stride

    if len(spans) > 1 and spans[-1][1] - spans[-1][0] < min_chunk:
        last = spans.pop()
        prev = spans.pop()
        spans.append((prev[0], last[1]))

    chunks = []
    for index, (w_start, w_end) in enumerate(spans):
        text = full_text[char_spans[w_start][0] : char_spans[w_end - 1][1]]
        chunks.append(Chunk(article_id=article_id, index=index, word_span=(w_start, w_end), text=text))
    return chunks


def word_count(article: Article) -> int:
    return len(whitespace_tokens(article.full_text))


def corpus_stats(articles: Iterable[Article]) -> CorpusStats:
    """Word-count statistics over a corpus; std is the population formula."""
    articles = list(articles)
    if not articles:
        raise FramelensError("corpus_stats requires a nonempty corpus")
    counts = [word_count(a) for a in articles]
    sentence_count = sum(len(segment_sentences(a.full_text)) for a in articles)
    return CorpusStats(
        article_count=len(articles),
        sentence_count=sentence_count,
        mean_words=statistics.fmean(counts),
        median_words=float(statistics.median(counts)),
        std_words=statistics.pstdev(counts),
        min_words=min(counts),
        max_words=max(counts),
    )


_NO_LOCATION = "location not specified"


def parse_relevance_response(text: str) -> tuple[bool, list[str]]:
    """Parse a relevance-classification response.

    Expects a "Relevance: Relevant|Not Relevant" line (case-insensitive) and
    an optional "Location: a; b; c" line where the literal
    "Location not specified" means no locations.
    """
    relevant: bool | None = None
    locations: list[str] = []
    for line in text.splitlines():
        stripped = line.strip()
        lowered = stripped.lower()
        if lowered.startswith("relevance:") and relevant is None:
            value = stripped[len("relevance:") :].strip().lower()
            if value == "relevant":
                relevant = True
            elif value == "not relevant":
                relevant = False
        elif lowered.startswith("location:"):
            value = stripped[len("location:") :].strip()
            if value.lower() == _NO_LOCATION:
                locations = []
            else:
                locations = [part.strip() for part in value.split(";") if part.strip()]
    if relevant is None:
        raise RelevanceParseError("no usable 'Relevance:' line found", raw=text)
    return relevant, locations
