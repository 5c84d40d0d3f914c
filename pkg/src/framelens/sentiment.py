"""Hybrid two-stage sentiment classification and label harmonization.

Every model family's native output (compound score, five-class label, softmax
probabilities, chunk negativity scores) is mapped into the unified label space
{-1, 0, +1} for negative, neutral, positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .compound import CompoundScorer
from .corpus import Article, segment_sentences
from .lexicon import Lexicon, default_lexicon, detect_victims, match_lexicon
from .utils import FramelensError

POSITIVE_THRESHOLD = 0.20
NEGATIVE_THRESHOLD = -0.20
NEPL_PATTERN_MIN = 3

STAGE_COMPOUND = "compound"
STAGE_REGEX = "regex"

FIVE_CLASSES = ("very_negative", "negative", "neutral", "positive", "very_positive")
FIVE_TO_THREE = {
    "very_negative": -1,
    "negative": -1,
    "neutral": 0,
    "positive": 1,
    "very_positive": 1,
}

VALID_LABELS = (-1, 0, 1)


@dataclass(frozen=True)
class HybridResult:
    label: int
    compound: float
    fear_count: int
    victim_flag: bool
    stage: str


def decide_hybrid_label(
    compound: float,
    fear_count: int,
    pos_threshold: float = POSITIVE_THRESHOLD,
    neg_threshold: float = NEGATIVE_THRESHOLD,
    nepl_min: int = NEPL_PATTERN_MIN,
) -> tuple[int, str]:
    """The two-stage decision rule: (label, stage).

    Threshold comparisons are strict, so boundary compounds fall into the
    ambiguous band and are decided by the pattern count.
    """
    if compound > pos_threshold:
        return 1, STAGE_COMPOUND
    if compound < neg_threshold:
        return -1, STAGE_COMPOUND
    return (-1 if fear_count >= nepl_min else 0), STAGE_REGEX


def classify_hybrid(
    article: Article | str,
    lexicon: Lexicon | None = None,
    scorer: CompoundScorer | None = None,
    pos_threshold: float = POSITIVE_THRESHOLD,
    neg_threshold: float = NEGATIVE_THRESHOLD,
    nepl_min: int = NEPL_PATTERN_MIN,
) -> HybridResult:
    """Two-stage rule classifier.

    Stage one thresholds the compound score: strictly above `pos_threshold`
    is positive, strictly below `neg_threshold` is negative. Scores in the
    ambiguous band (boundaries included) fall through to the pattern stage:
    at least `nepl_min` portrayal-lexicon occurrences make the article
    negative, otherwise it is neutral. fear_count (occurrences) and
    victim_flag are always populated.
    """
    if pos_threshold <= neg_threshold:
        raise FramelensError(f"pos_threshold ({pos_threshold}) must exceed neg_threshold ({neg_threshold})")
    if lexicon is None:
        lexicon = default_lexicon()
    if scorer is None:
        scorer = CompoundScorer()
    text = article.full_text if isinstance(article, Article) else article
    sentences = segment_sentences(text)
    fear_count = len(match_lexicon(sentences, lexicon))
    victim_flag = detect_victims(sentences).victim_flag
    compound = scorer.score(text)
    label, stage = decide_hybrid_label(compound, fear_count, pos_threshold, neg_threshold, nepl_min)
    return HybridResult(label=label, compound=compound, fear_count=fear_count, victim_flag=victim_flag, stage=stage)


def map_five_to_three(label: str) -> int:
    """Collapse a five-class label into {-1, 0, +1}."""
    try:
        return FIVE_TO_THREE[label]
    except KeyError:
        raise FramelensError(f"unknown five-class label {label!r}; expected one of {FIVE_CLASSES}") from None


def map_probabilities(p_neg: float, p_neu: float, p_pos: float) -> int:
    """Argmax over (negative, neutral, positive) probabilities.

    Exact ties resolve to neutral when neutral is among the tied classes,
    otherwise to negative (the conservative readings of ambiguity).
    """
    probs = (p_neg, p_neu, p_pos)
    if any(p < 0 for p in probs):
        raise FramelensError(f"probabilities must be non-negative, got {probs}")
    if abs(sum(probs) - 1.0) > 1e-6:
        raise FramelensError(f"probabilities must sum to 1 within 1e-6, got {sum(probs)!r}")
    best = max(probs)
    tied = [label for label, p in zip(VALID_LABELS, probs) if p == best]
    if len(tied) == 1:
        return tied[0]
    return 0 if 0 in tied else -1


def kmeans_1d(values: Sequence[float], k: int) -> tuple[list[int], list[float], float]:
    """Exact k-means for one-dimensional data via dynamic programming.

    Optimal SSE clusters of 1-D points are intervals of the sorted order, so
    the search space is the contiguous partitions. The DP runs over distinct
    values weighted by multiplicity, which keeps equal inputs in the same
    cluster; `k` is capped at the number of distinct values. Returns
    (assignments, centers, sse) where assignments index `centers`, sorted
    ascending. Deterministic; no seeding involved.
    """
    n = len(values)
    if n == 0:
        raise FramelensError("kmeans_1d requires at least one value")
    if k < 1:
        raise FramelensError(f"k must be >= 1, got {k}")

    weights_by_value: dict[float, int] = {}
    for value in values:
        value = float(value)
        weights_by_value[value] = weights_by_value.get(value, 0) + 1
    xs = sorted(weights_by_value)
    d = len(xs)
    k = min(k, d)

    prefix_w = [0.0] * (d + 1)
    prefix_wx = [0.0] * (d + 1)
    prefix_wxx = [0.0] * (d + 1)
    for i, x in enumerate(xs):
        w = weights_by_value[x]
        prefix_w[i + 1] = prefix_w[i] + w
        prefix_wx[i + 1] = prefix_wx[i] + w * x
        prefix_wxx[i + 1] = prefix_wxx[i] + w * x * x

    def interval_sse(i: int, j: int) -> float:
        w = prefix_w[j] - prefix_w[i]
        s = prefix_wx[j] - prefix_wx[i]
        sq = prefix_wxx[j] - prefix_wxx[i]
        return max(0.0, sq - s * s / w)

    # cost[m][i]: best SSE for the first i distinct values in m clusters.
    inf = float("inf")
    cost = [[inf] * (d + 1) for _ in range(k + 1)]
    split = [[0] * (d + 1) for _ in range(k + 1)]
    cost[0][0] = 0.0
    for m in range(1, k + 1):
        for i in range(m, d + 1):
            best, best_j = inf, m - 1
            for j in range(m - 1, i):
                if cost[m - 1][j] == inf:
                    continue
                candidate = cost[m - 1][j] + interval_sse(j, i)
                if candidate < best:
                    best, best_j = candidate, j
            cost[m][i] = best
            split[m][i] = best_j

    bounds = [d]
    i = d
    for m in range(k, 0, -1):
        i = split[m][i]
        bounds.append(i)
    bounds.reverse()

    cluster_of_value: dict[float, int] = {}
    centers = []
    for cluster, (lo, hi) in enumerate(zip(bounds[:-1], bounds[1:])):
        centers.append((prefix_wx[hi] - prefix_wx[lo]) / (prefix_w[hi] - prefix_w[lo]))
        for pos in range(lo, hi):
            cluster_of_value[xs[pos]] = cluster
    assignments = [cluster_of_value[float(v)] for v in values]
    return assignments, centers, cost[k][d]


def cluster_article_scores(scores: Sequence[float], k: int = 3) -> list[int]:
    """Map per-article negativity scores to labels by exact 1-D k-means.

    Clusters ordered by ascending centroid map to (+1, 0, -1): the lowest
    negativity cluster is positive. Degenerate input (fewer than k distinct
    values, hence also zero variance) labels every article neutral.
    """
    scores = list(scores)
    if not scores:
        raise FramelensError("cluster_article_scores requires a nonempty score list")
    for score in scores:
        if not 0.0 <= score <= 1.0:
            raise FramelensError(f"scores must lie in [0, 1], got {score!r}")
    if k != 3:
        raise FramelensError(f"label mapping is defined for k=3, got k={k}")
    if len(set(scores)) < k:
        return [0] * len(scores)
    assignments, _, _ = kmeans_1d(scores, k)
    label_by_cluster = (1, 0, -1)
    return [label_by_cluster[cluster] for cluster in assignments]


def mean_chunk_scores(chunk_scores: Iterable[tuple[str, float]]) -> dict[str, float]:
    """Per-article mean of (article_id, chunk_negative_score) pairs."""
    totals: dict[str, list[float]] = {}
    for article_id, score in chunk_scores:
        totals.setdefault(article_id, []).append(score)
    return {article_id: sum(vals) / len(vals) for article_id, vals in totals.items()}
