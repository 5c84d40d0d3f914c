"""Portrayal-lexicon loading, phrase matching, and victim-mention detection.

Matching is case-insensitive over whitespace tokens with edge punctuation
stripped. Multi-word entries match contiguous token runs; at each position the
longest matching entry wins and shorter overlapping entries are suppressed.
No stemming or lemmatization is applied: entries are surface forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping, Sequence

from .corpus import Sentence
from .utils import FramelensError, normalize_token

NEPL_CATEGORIES = (
    "Aggression and Violence",
    "Intrusion and Invasion",
    "Destruction and Damage",
    "Fear and Panic",
    "Metaphorical/Anthropomorphic Labels",
    "Conflict and Hostility",
)

VICTIM_CATEGORY = "Victim Terms"
NEGATION_CATEGORY = "Negation Cues"

# A victim term is cancelled when a negation cue sits within this many tokens
# before it in the same sentence ("no casualties were reported").
NEGATION_WINDOW = 3


class LexiconLoadError(FramelensError):
    """A lexicon file is malformed; the message names the offending line."""


@dataclass(frozen=True)
class LexiconMatch:
    term: str
    category: str
    sentence_index: int
    token_span: tuple[int, int]


@dataclass(frozen=True)
class VictimReport:
    victim_flag: bool
    matched_terms: tuple[tuple[str, int], ...]
    negated_terms: tuple[tuple[str, int], ...]


class Lexicon:
    """Immutable category -> entries mapping with a longest-match index."""

    def __init__(self, categories: Mapping[str, Sequence[str]]):
        self.categories: dict[str, tuple[str, ...]] = {
            category: tuple(entries) for category, entries in categories.items()
        }
        # First token -> candidate entries, longest first; ties resolve by
        # category order, then entry order, so matching is deterministic.
        index: dict[str, list[tuple[int, int, int, tuple[str, ...], str, str]]] = {}
        for cat_rank, (category, entries) in enumerate(self.categories.items()):
            for entry_rank, term in enumerate(entries):
                tokens = tuple(term.split())
                index.setdefault(tokens[0], []).append((-len(tokens), cat_rank, entry_rank, tokens, term, category))
        self._index: dict[str, tuple[tuple[tuple[str, ...], str, str], ...]] = {
            first: tuple((tokens, term, category) for _, _, _, tokens, term, category in sorted(candidates))
            for first, candidates in index.items()
        }
        self._max_len = max((len(t.split()) for e in self.categories.values() for t in e), default=0)

    def candidates(self, first_token: str):
        return self._index.get(first_token, ())

    def __contains__(self, term: str) -> bool:
        return any(term in entries for entries in self.categories.values())

    def term_count(self) -> int:
        return sum(len(entries) for entries in self.categories.values())


def _parse_category_file(path, allowed_categories: Sequence[str] | None) -> Lexicon:
    categories: dict[str, list[str]] = {}
    current: str | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw_line in enumerate(fh, start=1):
            line = raw_line.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("[") and line.endswith("]"):
                name = line[1:-1].strip()
                if not name:
                    raise LexiconLoadError(f"{path}:{lineno}: empty category name")
                if allowed_categories is not None and name not in allowed_categories:
                    raise LexiconLoadError(f"{path}:{lineno}: unknown category {name!r}")
                if name in categories:
                    raise LexiconLoadError(f"{path}:{lineno}: duplicate category {name!r}")
                categories[name] = []
                current = name
                continue
            if current is None:
                raise LexiconLoadError(f"{path}:{lineno}: entry {line!r} appears before any [Category] header")
            term = " ".join(line.lower().split())
            if not term:
                raise LexiconLoadError(f"{path}:{lineno}: empty entry")
            if term in categories[current]:
                raise LexiconLoadError(f"{path}:{lineno}: duplicate entry {term!r} in category {current!r}")
            categories[current].append(term)
    if not categories or all(not entries for entries in categories.values()):
        raise LexiconLoadError(f"{path}: no lexicon entries found")
    for name, entries in categories.items():
        if not entries:
            raise LexiconLoadError(f"{path}: category {name!r} has no entries")
    return Lexicon(categories)


def load_lexicon(path, allowed_categories: Sequence[str] | None = NEPL_CATEGORIES) -> Lexicon:
    """Load a category -> terms file; entries are lowercased on load.

    By default the category names are restricted to the six portrayal
    categories; pass ``allowed_categories=None`` to accept any.
    """
    return _parse_category_file(path, allowed_categories)


def _bundled(name: str):
    return resources.files("framelens.data").joinpath(name)


_DEFAULTS: dict[str, Lexicon] = {}


def default_lexicon() -> Lexicon:
    if "nepl" not in _DEFAULTS:
        with resources.as_file(_bundled("nepl_lexicon.txt")) as path:
            _DEFAULTS["nepl"] = load_lexicon(path)
    return _DEFAULTS["nepl"]


def default_victim_terms() -> Lexicon:
    if "victim" not in _DEFAULTS:
        with resources.as_file(_bundled("victim_terms.txt")) as path:
            _DEFAULTS["victim"] = load_lexicon(path, allowed_categories=(VICTIM_CATEGORY,))
    return _DEFAULTS["victim"]


def default_negation_cues() -> Lexicon:
    if "negation" not in _DEFAULTS:
        with resources.as_file(_bundled("negation_cues.txt")) as path:
            _DEFAULTS["negation"] = load_lexicon(path, allowed_categories=(NEGATION_CATEGORY,))
    return _DEFAULTS["negation"]


def _sentence_tokens(text: str) -> list[str]:
    # Positional: empty strings stand in for pure-punctuation tokens so that
    # token spans line up with the whitespace tokenization.
    return [normalize_token(tok) for tok in text.split()]


def _match_tokens(tokens: Sequence[str], lexicon: Lexicon, sentence_index: int) -> list[LexiconMatch]:
    matches: list[LexiconMatch] = []
    i = 0
    n = len(tokens)
    while i < n:
        token = tokens[i]
        if not token:
            i += 1
            continue
        hit = None
        for entry_tokens, term, category in lexicon.candidates(token):
            length = len(entry_tokens)
            if i + length <= n and tuple(tokens[i : i + length]) == entry_tokens:
                hit = (term, category, length)
                break
        if hit is None:
            i += 1
            continue
        term, category, length = hit
        matches.append(
            LexiconMatch(term=term, category=category, sentence_index=sentence_index, token_span=(i, i + length))
        )
        i += length
    return matches


def match_lexicon(sentences: Iterable[Sentence], lexicon: Lexicon) -> list[LexiconMatch]:
    """All lexicon matches across sentences, longest-match-first per position."""
    matches: list[LexiconMatch] = []
    for sentence in sentences:
        matches.extend(_match_tokens(_sentence_tokens(sentence.text), lexicon, sentence.index))
    return matches


def category_presence(
    matches: Iterable[LexiconMatch],
    categories: Sequence[str] = NEPL_CATEGORIES,
) -> tuple[dict[str, bool], int]:
    """Per-category presence flags plus the total occurrence count.

    The count is over match occurrences, not distinct terms, so repetition
    raises it.
    """
    flags = {category: False for category in categories}
    count = 0
    for match in matches:
        flags[match.category] = True
        count += 1
    return flags, count


def nepl_count(sentences: Iterable[Sentence], lexicon: Lexicon | None = None) -> int:
    """Occurrence count of portrayal-lexicon matches over sentences."""
    if lexicon is None:
        lexicon = default_lexicon()
    return len(match_lexicon(sentences, lexicon))


def detect_victims(
    sentences: Iterable[Sentence],
    victim_terms: Lexicon | None = None,
    negation_cues: Lexicon | None = None,
) -> VictimReport:
    """Flag victim mentions, cancelling matches negated within a 3-token window.

    A match is negated when a negation cue occurs entirely within the three
    tokens immediately preceding the match in the same sentence.
    """
    if victim_terms is None:
        victim_terms = default_victim_terms()
    if negation_cues is None:
        negation_cues = default_negation_cues()

    matched: list[tuple[str, int]] = []
    negated: list[tuple[str, int]] = []
    flag = False
    for sentence in sentences:
        tokens = _sentence_tokens(sentence.text)
        cue_spans = [m.token_span for m in _match_tokens(tokens, negation_cues, sentence.index)]
        for match in _match_tokens(tokens, victim_terms, sentence.index):
            start = match.token_span[0]
            window_start = max(0, start - NEGATION_WINDOW)
            entry = (match.term, sentence.index)
            matched.append(entry)
            if any(window_start <= cs and ce <= start for cs, ce in cue_spans):
                negated.append(entry)
            else:
                flag = True
    return VictimReport(victim_flag=flag, matched_terms=tuple(matched), negated_terms=tuple(negated))
