"""Lexicon-and-rule compound sentiment scoring.

Implements the rule layer of the VADER algorithm (Hutto & Gilbert 2014) over a
pluggable valence lexicon: token valences are adjusted for degree modifiers
(with distance damping), negation within a three-token window, ALL-CAPS
emphasis, contrastive "but" clauses, and terminal punctuation, then the sum is
normalized into [-1, +1] via x / sqrt(x^2 + alpha). Emoticons and slang-idiom
special cases are deliberately omitted: this scorer targets news prose.
"""

from __future__ import annotations

import math
from importlib import resources
from typing import Mapping

from .utils import ConfigurationError, strip_edge_punctuation

BOOSTER_STEP = 0.293
CAPS_EMPHASIS = 0.733
NEGATION_SCALAR = -0.74
EXCLAMATION_STEP = 0.292
MAX_EXCLAMATIONS = 4
NORMALIZATION_ALPHA = 15.0

# Damping of a degree modifier by its distance from the scored token.
_DISTANCE_DAMPING = (1.0, 0.95, 0.9)

_INTENSIFIERS = (
    "absolutely", "amazingly", "awfully", "completely", "considerably",
    "decidedly", "deeply", "enormously", "entirely", "especially",
    "exceptionally", "extremely", "fully", "greatly", "highly", "hugely",
    "incredibly", "intensely", "majorly", "more", "most", "particularly",
    "purely", "quite", "really", "remarkably", "so", "substantially",
    "thoroughly", "totally", "tremendously", "unbelievably", "unusually",
    "utterly", "very",
)
_DAMPENERS = (
    "almost", "barely", "hardly", "kinda", "less", "little", "marginally",
    "occasionally", "partly", "scarcely", "slightly", "somewhat", "sorta",
)
BOOSTERS: dict[str, float] = {w: BOOSTER_STEP for w in _INTENSIFIERS}
BOOSTERS.update({w: -BOOSTER_STEP for w in _DAMPENERS})

# "no" is handled separately (it may carry its own valence); "n't" suffixes are
# recognized structurally.
NEGATORS = frozenset(
    (
        "aint", "ain't", "arent", "aren't", "cannot", "cant", "can't",
        "couldnt", "couldn't", "darent", "daren't", "despite", "didnt",
        "didn't", "doesnt", "doesn't", "dont", "don't", "hadnt", "hadn't",
        "hasnt", "hasn't", "havent", "haven't", "isnt", "isn't", "mightnt",
        "mightn't", "mustnt", "mustn't", "neednt", "needn't", "neither",
        "never", "none", "nope", "nor", "not", "nothing", "nowhere",
        "oughtnt", "oughtn't", "rarely", "seldom", "shant", "shan't",
        "shouldnt", "shouldn't", "uh-uh", "uhuh", "wasnt", "wasn't",
        "werent", "weren't", "without", "wont", "won't", "wouldnt",
        "wouldn't",
    )
)


def is_negator(word: str) -> bool:
    return word in NEGATORS or "n't" in word


def normalize_score(raw_sum: float, alpha: float = NORMALIZATION_ALPHA) -> float:
    if raw_sum == 0.0:
        return 0.0
    score = raw_sum / math.sqrt(raw_sum * raw_sum + alpha)
    return max(-1.0, min(1.0, score))


def load_valence_lexicon(path) -> dict[str, float]:
    """Load a token<TAB>valence file; valences must lie in [-4, +4]."""
    lexicon: dict[str, float] = {}
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot open valence lexicon {path}: {exc}") from exc
    with fh:
        for lineno, raw_line in enumerate(fh, start=1):
            line = raw_line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ConfigurationError(f"{path}:{lineno}: expected 'token<TAB>valence', got {line!r}")
            token = parts[0].strip().lower()
            try:
                valence = float(parts[1])
            except ValueError:
                raise ConfigurationError(f"{path}:{lineno}: non-numeric valence {parts[1]!r}") from None
            if not token:
                raise ConfigurationError(f"{path}:{lineno}: empty token")
            if not -4.0 <= valence <= 4.0:
                raise ConfigurationError(f"{path}:{lineno}: valence {valence} outside [-4, +4]")
            if token in lexicon:
                raise ConfigurationError(f"{path}:{lineno}: duplicate token {token!r}")
            lexicon[token] = valence
    if not lexicon:
        raise ConfigurationError(f"{path}: valence lexicon is empty")
    return lexicon


_DEFAULT_VALENCES: dict[str, float] | None = None


def default_valence_lexicon() -> dict[str, float]:
    global _DEFAULT_VALENCES
    if _DEFAULT_VALENCES is None:
        with resources.as_file(resources.files("framelens.data").joinpath("valence_lexicon.tsv")) as path:
            _DEFAULT_VALENCES = load_valence_lexicon(path)
    return _DEFAULT_VALENCES


class CompoundScorer:
    """Reusable scorer bound to a valence lexicon and modifier tables."""

    def __init__(
        self,
        valence_lexicon: Mapping[str, float] | None = None,
        boosters: Mapping[str, float] | None = None,
        negators: frozenset[str] | None = None,
        alpha: float = NORMALIZATION_ALPHA,
    ):
        if valence_lexicon is None:
            valence_lexicon = default_valence_lexicon()
        if not valence_lexicon:
            raise ConfigurationError("valence lexicon is empty")
        self.lexicon = dict(valence_lexicon)
        self.boosters = dict(BOOSTERS if boosters is None else boosters)
        self.negators = NEGATORS if negators is None else negators
        self.alpha = alpha

    def _negated(self, word: str) -> bool:
        return word in self.negators or "n't" in word

    def _booster_scalar(self, original: str, matchable: str, valence: float, cap_diff: bool) -> float:
        scalar = self.boosters.get(matchable, 0.0)
        if scalar == 0.0:
            return 0.0
        if valence < 0:
            scalar = -scalar
        if original.isupper() and cap_diff:
            scalar += CAPS_EMPHASIS if valence > 0 else -CAPS_EMPHASIS
        return scalar

    def _apply_negation(self, valence: float, words: list[str], i: int, distance: int) -> float:
        if distance == 1:
            if self._negated(words[i - 1]):
                valence *= NEGATION_SCALAR
        elif distance == 2:
            if words[i - 2] == "never" and words[i - 1] in ("so", "this"):
                valence *= 1.25
            elif words[i - 2] == "without" and words[i - 1] == "doubt":
                pass
            elif self._negated(words[i - 2]):
                valence *= NEGATION_SCALAR
        elif distance == 3:
            if words[i - 3] == "never" and (words[i - 2] in ("so", "this") or words[i - 1] in ("so", "this")):
                valence *= 1.25
            elif words[i - 3] == "without" and "doubt" in (words[i - 2], words[i - 1]):
                pass
            elif self._negated(words[i - 3]):
                valence *= NEGATION_SCALAR
        return valence

    def _token_valence(self, originals: list[str], words: list[str], i: int, cap_diff: bool) -> float:
        word = words[i]
        if word not in self.lexicon:
            return 0.0
        valence = self.lexicon[word]
        # "no" right before a lexicon token acts as a negation, not a score.
        if word == "no" and i + 1 < len(words) and words[i + 1] in self.lexicon:
            return 0.0
        if (
            (i >= 1 and words[i - 1] == "no")
            or (i >= 2 and words[i - 2] == "no")
            or (i >= 3 and words[i - 3] == "no" and words[i - 1] in ("or", "nor"))
        ):
            valence *= NEGATION_SCALAR
        if originals[i].isupper() and cap_diff:
            valence += CAPS_EMPHASIS if valence > 0 else -CAPS_EMPHASIS
        for distance in (1, 2, 3):
            j = i - distance
            if j < 0 or words[j] in self.lexicon:
                continue
            scalar = self._booster_scalar(originals[j], words[j], valence, cap_diff)
            valence += scalar * _DISTANCE_DAMPING[distance - 1]
            valence = self._apply_negation(valence, words, i, distance)
        # "least" immediately before flips, except "at least" / "very least".
        if i >= 1 and words[i - 1] == "least" and "least" not in self.lexicon:
            if not (i >= 2 and words[i - 2] in ("at", "very")):
                valence *= NEGATION_SCALAR
        return valence

    def _punctuation_emphasis(self, text: str) -> float:
        emphasis = min(text.count("!"), MAX_EXCLAMATIONS) * EXCLAMATION_STEP
        qm = text.count("?")
        if qm > 1:
            emphasis += qm * 0.18 if qm <= 3 else 0.96
        return emphasis

    def score(self, text: str) -> float:
        """Compound polarity of `text` in [-1, +1]; 0.0 for empty input."""
        originals = text.split()
        if not originals:
            return 0.0
        words = [strip_edge_punctuation(tok).lower() for tok in originals]
        alpha_tokens = [tok for tok in originals if any(ch.isalpha() for ch in tok)]
        upper = sum(1 for tok in alpha_tokens if tok.isupper())
        cap_diff = 0 < upper < len(alpha_tokens)

        sentiments: list[float] = []
        for i, word in enumerate(words):
            if word in self.boosters:
                sentiments.append(0.0)
                continue
            if word == "kind" and i + 1 < len(words) and words[i + 1] == "of":
                sentiments.append(0.0)
                continue
            sentiments.append(self._token_valence(originals, words, i, cap_diff))

        if "but" in words:
            pivot = words.index("but")
            sentiments = [
                s * 0.5 if i < pivot else (s * 1.5 if i > pivot else s)
                for i, s in enumerate(sentiments)
            ]

        total = sum(sentiments)
        if total > 0:
            total += self._punctuation_emphasis(text)
        elif total < 0:
            total -= self._punctuation_emphasis(text)
        return normalize_score(total, self.alpha)


def compound_score(text: str, valence_lexicon: Mapping[str, float] | None = None) -> float:
    """One-shot compound score; loads the bundled valence lexicon by default."""
    return CompoundScorer(valence_lexicon).score(text)
