"""Evaluation against expert annotations: classification metrics and
rationale-overlap scoring (BLEU, ROUGE-L)."""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .ensemble import ModelPrediction
from .sentiment import VALID_LABELS
from .utils import FramelensError, normalize_token, read_jsonl

logger = logging.getLogger(__name__)

FINAL_ANNOTATOR = "final"
CLASS_ORDER = (-1, 0, 1)
MAX_BLEU_ORDER = 4


@dataclass(frozen=True)
class GoldAnnotation:
    article_id: str
    label: int
    intensity: int
    nepl_terms: tuple[str, ...]
    justification_sentences: tuple[str, ...]
    deaths_mentioned: bool
    human_deaths: int
    elephant_deaths: int
    annotator_id: str


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class ClassMetrics:
    per_class: dict[int, ClassScores]
    accuracy: float


@dataclass(frozen=True)
class OverlapScores:
    bleu: float
    rouge_l: float
    per_article: tuple[tuple[str, float, float], ...]


def load_annotations(path) -> list[GoldAnnotation]:
    """Load expert annotations from JSONL; malformed records are an error."""
    annotations: list[GoldAnnotation] = []
    seen: set[tuple[str, str]] = set()
    for lineno, record in read_jsonl(path):
        where = f"{path}:{lineno}"
        article_id = str(record.get("article_id") or "")
        if not article_id:
            raise FramelensError(f"{where}: missing article_id")
        label = record.get("label")
        if label not in VALID_LABELS:
            raise FramelensError(f"{where}: label must be one of {VALID_LABELS}, got {label!r}")
        intensity = record.get("intensity")
        if not isinstance(intensity, int) or not 1 <= intensity <= 10:
            raise FramelensError(f"{where}: intensity must be an integer in [1, 10], got {intensity!r}")
        deaths_mentioned = bool(record.get("deaths_mentioned", False))
        human_deaths = int(record.get("human_deaths", 0) or 0)
        elephant_deaths = int(record.get("elephant_deaths", 0) or 0)
        if human_deaths < 0 or elephant_deaths < 0:
            raise FramelensError(f"{where}: death counts must be non-negative")
        if not deaths_mentioned and (human_deaths or elephant_deaths):
            raise FramelensError(f"{where}: death counts given but deaths_mentioned is false")
        annotator_id = str(record.get("annotator_id") or FINAL_ANNOTATOR)
        key = (article_id, annotator_id)
        if key in seen:
            raise FramelensError(f"{where}: duplicate annotation for article {article_id!r} by {annotator_id!r}")
        seen.add(key)
        annotations.append(
            GoldAnnotation(
                article_id=article_id,
                label=int(label),  # type: ignore[arg-type]
                intensity=intensity,
                nepl_terms=tuple(str(t) for t in record.get("nepl_terms") or ()),
                justification_sentences=tuple(str(s) for s in record.get("justification_sentences") or ()),
                deaths_mentioned=deaths_mentioned,
                human_deaths=human_deaths,
                elephant_deaths=elephant_deaths,
                annotator_id=annotator_id,
            )
        )
    return annotations


def select_annotator(annotations: Iterable[GoldAnnotation], annotator_id: str = FINAL_ANNOTATOR) -> list[GoldAnnotation]:
    return [a for a in annotations if a.annotator_id == annotator_id]


def confusion_matrix(gold: Sequence[GoldAnnotation], preds: Sequence[ModelPrediction]) -> np.ndarray:
    """3x3 counts with rows = gold and columns = predicted, class order (-1, 0, +1)."""
    if not gold:
        raise FramelensError("confusion_matrix requires a nonempty gold set")
    by_article: dict[str, int] = {}
    for pred in preds:
        if pred.article_id in by_article:
            raise FramelensError(f"multiple predictions for article {pred.article_id!r}")
        by_article[pred.article_id] = pred.label
    missing = [g.article_id for g in gold if g.article_id not in by_article]
    if missing:
        raise FramelensError(f"missing predictions for gold articles: {', '.join(missing)}")
    index = {label: i for i, label in enumerate(CLASS_ORDER)}
    matrix = np.zeros((3, 3), dtype=np.int64)
    for annotation in gold:
        matrix[index[annotation.label], index[by_article[annotation.article_id]]] += 1
    return matrix


def class_metrics(matrix: np.ndarray) -> ClassMetrics:
    """Precision/recall/F1 per class plus accuracy; zero denominators give 0."""
    matrix = np.asarray(matrix)
    if matrix.shape != (3, 3) or (matrix < 0).any() or not np.issubdtype(matrix.dtype, np.integer):
        raise FramelensError("class_metrics expects a 3x3 non-negative integer matrix")
    total = int(matrix.sum())
    if total == 0:
        raise FramelensError("class_metrics requires a matrix with at least one count")
    per_class: dict[int, ClassScores] = {}
    for i, label in enumerate(CLASS_ORDER):
        true_positive = int(matrix[i, i])
        col_sum = int(matrix[:, i].sum())
        row_sum = int(matrix[i, :].sum())
        precision = true_positive / col_sum if col_sum else 0.0
        recall = true_positive / row_sum if row_sum else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[label] = ClassScores(precision=precision, recall=recall, f1=f1, support=row_sum)
    accuracy = float(np.trace(matrix)) / total
    return ClassMetrics(per_class=per_class, accuracy=accuracy)


def disagreement_breakdown(matrix: np.ndarray) -> dict[tuple[int, int], float]:
    """Off-diagonal (gold, predicted) cells as fractions of all disagreements."""
    matrix = np.asarray(matrix)
    off_diagonal = matrix.sum() - np.trace(matrix)
    if off_diagonal == 0:
        return {}
    breakdown = {}
    for i, gold_label in enumerate(CLASS_ORDER):
        for j, pred_label in enumerate(CLASS_ORDER):
            if i != j and matrix[i, j]:
                breakdown[(gold_label, pred_label)] = float(matrix[i, j]) / float(off_diagonal)
    return breakdown


def _clean_tokens(tokens: Iterable[str]) -> list[str]:
    out = []
    for token in tokens:
        norm = normalize_token(str(token))
        if norm:
            out.append(norm)
    return out


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: Sequence[str], reference: Sequence[str]) -> float:
    """Sentence BLEU with reference-clipped counts and a fixed smoothing rule.

    Uniform geometric mean over n-gram orders 1..4, restricted to orders the
    candidate can attain. A zero precision at order n >= 2 is replaced by
    1 / (2 * candidate n-gram count); a zero unigram precision yields 0.
    Brevity penalty exp(1 - r/c) applies when the candidate is shorter.
    Tokens are lowercased with edge punctuation stripped.
    """
    cand = _clean_tokens(candidate)
    ref = _clean_tokens(reference)
    if not cand or not ref:
        return 0.0
    max_order = min(MAX_BLEU_ORDER, len(cand))
    log_sum = 0.0
    for n in range(1, max_order + 1):
        cand_ngrams = _ngrams(cand, n)
        ref_ngrams = _ngrams(ref, n)
        total = sum(cand_ngrams.values())
        clipped = sum(min(count, ref_ngrams[gram]) for gram, count in cand_ngrams.items())
        if clipped == 0:
            if n == 1:
                return 0.0
            precision = 1.0 / (2.0 * total)
        else:
            precision = clipped / total
        log_sum += math.log(precision)
    score = math.exp(log_sum / max_order)
    if len(cand) < len(ref):
        score *= math.exp(1.0 - len(ref) / len(cand))
    return score


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for token_a in a:
        current = [0]
        for j, token_b in enumerate(b, start=1):
            if token_a == token_b:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[-1]


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> float:
    """ROUGE-L F-measure with beta = 1 over the longest common subsequence."""
    cand = _clean_tokens(candidate)
    ref = _clean_tokens(reference)
    if not cand or not ref:
        return 0.0
    lcs = _lcs_length(cand, ref)
    if lcs == 0:
        return 0.0
    precision = lcs / len(cand)
    recall = lcs / len(ref)
    return 2 * precision * recall / (precision + recall)


def rationale_overlap(
    gold: Sequence[GoldAnnotation],
    preds: Sequence[ModelPrediction],
) -> OverlapScores:
    """Macro-averaged BLEU and ROUGE-L of model rationales against expert
    justifications.

    Per article, the justification sentences (reference) and rationale
    sentences (candidate) are each concatenated in stored document order into
    one token sequence. Articles with an empty gold justification are
    excluded from the average and logged.
    """
    by_article = {}
    for pred in preds:
        if pred.article_id in by_article:
            raise FramelensError(f"multiple predictions for article {pred.article_id!r}")
        by_article[pred.article_id] = pred
    missing = [g.article_id for g in gold if g.article_id not in by_article]
    if missing:
        raise FramelensError(f"missing predictions for gold articles: {', '.join(missing)}")

    per_article: list[tuple[str, float, float]] = []
    for annotation in gold:
        if not annotation.justification_sentences:
            logger.warning("article %s has no justification sentences; excluded from overlap", annotation.article_id)
            continue
        reference = " ".join(annotation.justification_sentences).split()
        candidate = " ".join(by_article[annotation.article_id].rationale_sentences).split()
        per_article.append(
            (annotation.article_id, bleu(candidate, reference), rouge_l(candidate, reference))
        )
    if not per_article:
        raise FramelensError("no articles with justification sentences to score")
    mean_bleu = sum(entry[1] for entry in per_article) / len(per_article)
    mean_rouge = sum(entry[2] for entry in per_article) / len(per_article)
    return OverlapScores(bleu=mean_bleu, rouge_l=mean_rouge, per_article=tuple(per_article))
