"""Per-model prediction ingestion and cross-model agreement analysis."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus import Article
from .sentiment import VALID_LABELS, map_five_to_three, map_probabilities
from .utils import FramelensError, collapse_whitespace, read_jsonl

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelPrediction:
    model_id: str
    article_id: str
    label: int
    confidence: float | None = None
    rationale_sentences: tuple[str, ...] = ()
    reasoning: str | None = None
    raw: str | None = None


@dataclass(frozen=True)
class AgreementSummary:
    models: tuple[str, ...]
    article_count: int
    vote_histogram: dict[int, int]
    fraction_at_least: dict[int, float]
    pairwise_agreement: list[list[float]]
    label_distribution_per_model: dict[str, tuple[float, float, float]]


def _harmonize_label(record: Mapping[str, object], where: str) -> int:
    """Resolve a record's label from whichever native output it carries.

    Accepted carriers: `label` in {-1, 0, 1}, a `five_class` string, or a
    `probabilities` triple (negative, neutral, positive). This keeps all
    label harmonization on the ingestion side.
    """
    carriers = [key for key in ("label", "five_class", "probabilities") if record.get(key) is not None]
    if len(carriers) != 1:
        raise FramelensError(f"{where}: expected exactly one of label/five_class/probabilities, got {carriers}")
    if "label" in carriers:
        label = record["label"]
        if label not in VALID_LABELS:
            raise FramelensError(f"{where}: label must be one of {VALID_LABELS}, got {label!r}")
        return int(label)  # type: ignore[arg-type]
    if "five_class" in carriers:
        return map_five_to_three(str(record["five_class"]))
    probs = record["probabilities"]
    if not isinstance(probs, Sequence) or len(probs) != 3:
        raise FramelensError(f"{where}: probabilities must be a [neg, neu, pos] triple")
    return map_probabilities(float(probs[0]), float(probs[1]), float(probs[2]))


def ingest_predictions(path, articles: Iterable[Article]) -> list[ModelPrediction]:
    """Load a JSONL prediction file, validating against the loaded corpus.

    Rationale sentences must appear verbatim (after whitespace normalization)
    in the article's full text; violations are logged and the offending
    sentence dropped while the prediction is kept. Unknown article ids are
    skipped with a diagnostic; duplicate (model, article) keys are an error.
    """
    by_id = {a.id: a for a in articles}
    normalized_text = {a.id: collapse_whitespace(a.full_text) for a in by_id.values()}
    predictions: list[ModelPrediction] = []
    seen: dict[tuple[str, str], int] = {}
    for lineno, record in read_jsonl(path):
        where = f"{path}:{lineno}"
        model_id = str(record.get("model_id") or "")
        article_id = str(record.get("article_id") or "")
        if not model_id or not article_id:
            raise FramelensError(f"{where}: record requires model_id and article_id")
        if article_id not in by_id:
            logger.warning("%s: unknown article_id %r; record skipped", where, article_id)
            continue
        if record.get("failed"):
            logger.warning("%s: failed model output for article %r; record skipped", where, article_id)
            continue
        key = (model_id, article_id)
        if key in seen:
            raise FramelensError(f"{where}: duplicate prediction for {key} (first seen at line {seen[key]})")
        seen[key] = lineno

        label = _harmonize_label(record, where)
        kept_rationales: list[str] = []
        for sentence in record.get("rationale_sentences") or []:
            if collapse_whitespace(str(sentence)) in normalized_text[article_id]:
                kept_rationales.append(str(sentence))
            else:
                logger.warning(
                    "%s: rationale not found verbatim in article %s; sentence dropped", where, article_id
                )
        confidence = record.get("confidence")
        predictions.append(
            ModelPrediction(
                model_id=model_id,
                article_id=article_id,
                label=label,
                confidence=None if confidence is None else float(confidence),  # type: ignore[arg-type]
                rationale_sentences=tuple(kept_rationales),
                reasoning=None if record.get("reasoning") is None else str(record["reasoning"]),
                raw=None if record.get("raw") is None else str(record["raw"]),
            )
        )
    return predictions


def agreement(
    predictions: Iterable[ModelPrediction],
    models: Sequence[str],
    articles: Iterable[Article],
) -> AgreementSummary:
    """Vote histogram, at-least-k negativity curve, pairwise agreement, and
    per-model label distributions over a fully covered (model x article) grid.
    """
    models = tuple(models)
    article_ids = [a.id for a in articles]
    if not models or not article_ids:
        raise FramelensError("agreement requires at least one model and one article")

    table: dict[tuple[str, str], int] = {}
    for pred in predictions:
        if pred.model_id in models and pred.article_id in set(article_ids):
            table[(pred.model_id, pred.article_id)] = pred.label
    gaps = [(m, a) for m in models for a in article_ids if (m, a) not in table]
    if gaps:
        shown = ", ".join(f"{m}/{a}" for m, a in gaps[:10])
        raise FramelensError(f"missing predictions for {len(gaps)} (model, article) pairs: {shown}")

    n_articles = len(article_ids)
    m = len(models)
    histogram = {votes: 0 for votes in range(m + 1)}
    for article_id in article_ids:
        negative_votes = sum(1 for model in models if table[(model, article_id)] == -1)
        histogram[negative_votes] += 1
    fraction_at_least = {
        k: sum(count for votes, count in histogram.items() if votes >= k) / n_articles
        for k in range(0, m + 1)
    }

    pairwise = [[0.0] * m for _ in range(m)]
    for i, model_a in enumerate(models):
        for j, model_b in enumerate(models):
            agree = sum(
                1 for article_id in article_ids if table[(model_a, article_id)] == table[(model_b, article_id)]
            )
            pairwise[i][j] = agree / n_articles

    distribution = {}
    for model in models:
        labels = [table[(model, article_id)] for article_id in article_ids]
        distribution[model] = (
            labels.count(-1) / n_articles,
            labels.count(0) / n_articles,
            labels.count(1) / n_articles,
        )
    return AgreementSummary(
        models=models,
        article_count=n_articles,
        vote_histogram=histogram,
        fraction_at_least=fraction_at_least,
        pairwise_agreement=pairwise,
        label_distribution_per_model=distribution,
    )
