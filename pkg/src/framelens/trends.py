"""Temporal aggregation and victim/portrayal cross-tabulation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .corpus import Article, segment_sentences
from .lexicon import Lexicon, default_lexicon, detect_victims, match_lexicon
from .utils import FramelensError

DEFAULT_SMOOTHING_WINDOW = 3


@dataclass(frozen=True)
class MonthlyTrend:
    month: tuple[int, int]
    article_count: int
    negative_count: int
    negativity_rate: float
    smoothed_count: float
    smoothed_rate: float


@dataclass(frozen=True)
class VictimNeplCrosstab:
    victim_and_nepl: int
    victim_only: int
    nepl_only: int
    neither: int
    percentages: dict[str, float]


def _next_month(month: tuple[int, int]) -> tuple[int, int]:
    year, mon = month
    return (year + 1, 1) if mon == 12 else (year, mon + 1)


def trailing_mean(values: list[float], window: int) -> list[float]:
    """Trailing rolling mean; the window shrinks at the series start."""
    if window < 1:
        raise FramelensError(f"window must be >= 1, got {window}")
    return [sum(values[max(0, i - window + 1) : i + 1]) / min(window, i + 1) for i in range(len(values))]


def monthly_trends(
    labeled_articles: Iterable[tuple[Article, int]],
    window: int = DEFAULT_SMOOTHING_WINDOW,
) -> list[MonthlyTrend]:
    """Per-month counts and negativity rates with trailing rolling means.

    Months with no articles inside the observed span are emitted zero-filled
    so the rolling window has a contiguous time base.
    """
    pairs = list(labeled_articles)
    if not pairs:
        raise FramelensError("monthly_trends requires a nonempty corpus")
    counts: dict[tuple[int, int], int] = {}
    negatives: dict[tuple[int, int], int] = {}
    for article, label in pairs:
        month = (article.publish_date.year, article.publish_date.month)
        counts[month] = counts.get(month, 0) + 1
        negatives[month] = negatives.get(month, 0) + (1 if label == -1 else 0)

    months = []
    month = min(counts)
    last = max(counts)
    while True:
        months.append(month)
        if month == last:
            break
        month = _next_month(month)

    raw_counts = [counts.get(m, 0) for m in months]
    raw_negatives = [negatives.get(m, 0) for m in months]
    rates = [neg / count if count else 0.0 for neg, count in zip(raw_negatives, raw_counts)]
    smoothed_counts = trailing_mean([float(c) for c in raw_counts], window)
    smoothed_rates = trailing_mean(rates, window)
    return [
        MonthlyTrend(
            month=m,
            article_count=raw_counts[i],
            negative_count=raw_negatives[i],
            negativity_rate=rates[i],
            smoothed_count=smoothed_counts[i],
            smoothed_rate=smoothed_rates[i],
        )
        for i, m in enumerate(months)
    ]


def victim_nepl_crosstab(articles: Iterable[Article], lexicon: Lexicon | None = None) -> VictimNeplCrosstab:
    """Four-cell breakdown of victim mentions against portrayal-term presence."""
    if lexicon is None:
        lexicon = default_lexicon()
    cells = {"victim_and_nepl": 0, "victim_only": 0, "nepl_only": 0, "neither": 0}
    total = 0
    for article in articles:
        sentences = segment_sentences(article.full_text)
        victim = detect_victims(sentences).victim_flag
        nepl = len(match_lexicon(sentences, lexicon)) >= 1
        if victim and nepl:
            cells["victim_and_nepl"] += 1
        elif victim:
            cells["victim_only"] += 1
        elif nepl:
            cells["nepl_only"] += 1
        else:
            cells["neither"] += 1
        total += 1
    percentages = {key: (100.0 * value / total if total else 0.0) for key, value in cells.items()}
    return VictimNeplCrosstab(
        victim_and_nepl=cells["victim_and_nepl"],
        victim_only=cells["victim_only"],
        nepl_only=cells["nepl_only"],
        neither=cells["neither"],
        percentages=percentages,
    )
