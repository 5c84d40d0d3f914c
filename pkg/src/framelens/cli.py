"""Command-line orchestration: load inputs, run pipelines, emit reports.

Subcommands: analyze, agree, eval, chunks, aggregate-chunks, stats. Every
flag can also be set through an environment variable named FRAMELENS_ plus
the uppercased flag (e.g. FRAMELENS_POS_THRESHOLD); explicit flags win.
Outputs are deterministic: identical inputs and configuration produce
byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import svgplot
from .compound import CompoundScorer, load_valence_lexicon
from .corpus import Article, chunk_words, corpus_stats, load_corpus, segment_sentences
from .ensemble import agreement, ingest_predictions
from .evaluation import (
    FINAL_ANNOTATOR,
    CLASS_ORDER,
    class_metrics,
    confusion_matrix,
    load_annotations,
    rationale_overlap,
    select_annotator,
)
from .lexicon import NEPL_CATEGORIES, category_presence, default_lexicon, load_lexicon, match_lexicon
from .sentiment import classify_hybrid, cluster_article_scores, mean_chunk_scores
from .trends import monthly_trends, victim_nepl_crosstab
from .utils import FramelensError, read_jsonl, write_jsonl

logger = logging.getLogger(__name__)

ENV_PREFIX = "FRAMELENS_"
RATIONALE_CAP = 5


@dataclass
class RunConfig:
    corpus_path: str | None = None
    lexicon_path: str | None = None
    valence_path: str | None = None
    predictions_paths: list[str] = field(default_factory=list)
    annotations_path: str | None = None
    scores_path: str | None = None
    output_dir: str = "reports"
    pos_threshold: float = 0.20
    neg_threshold: float = -0.20
    nepl_min: int = 3
    smoothing_window: int = 3
    agreement_k: int = 3
    chunk_size: int = 450
    chunk_overlap: int = 50
    min_chunk: int = 20
    annotator: str = FINAL_ANNOTATOR
    plots: bool = False

    def validate(self) -> None:
        if self.pos_threshold <= self.neg_threshold:
            raise FramelensError("--pos-threshold must exceed --neg-threshold")
        if self.nepl_min < 1:
            raise FramelensError("--nepl-min must be >= 1")
        if self.smoothing_window < 1:
            raise FramelensError("--smoothing-window must be >= 1")


def _env(flag: str, fallback):
    return os.environ.get(ENV_PREFIX + flag.replace("-", "_").upper(), fallback)


def _env_flag(flag: str) -> bool:
    return str(_env(flag, "")).strip().lower() not in ("", "0", "false", "no")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output-dir", default=_env("output-dir", "reports"), help="directory for report files")


def _add_corpus(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", required=_env("corpus", None) is None, default=_env("corpus", None),
                        help="JSONL corpus file, one article record per line")


def _add_thresholds(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lexicon", default=_env("lexicon", None), help="portrayal lexicon file (bundled default)")
    parser.add_argument("--valence", default=_env("valence", None), help="valence lexicon file (bundled default)")
    parser.add_argument("--pos-threshold", type=float, default=float(_env("pos-threshold", 0.20)))
    parser.add_argument("--neg-threshold", type=float, default=float(_env("neg-threshold", -0.20)))
    parser.add_argument("--nepl-min", type=int, default=int(_env("nepl-min", 3)))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="framelens", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="hybrid sentiment, portrayal flags, crosstab, and trends")
    _add_corpus(p)
    _add_thresholds(p)
    p.add_argument("--smoothing-window", type=int, default=int(_env("smoothing-window", 3)))
    p.add_argument("--plots", action="store_true", default=_env_flag("plots"))
    _add_common(p)

    p = sub.add_parser("agree", help="cross-model agreement report")
    _add_corpus(p)
    p.add_argument("--predictions", nargs="+", required=_env("predictions", None) is None,
                   default=None, help="prediction JSONL files, one or more")
    p.add_argument("--agreement-k", type=int, default=int(_env("agreement-k", 3)))
    _add_common(p)

    p = sub.add_parser("eval", help="score predictions against expert annotations")
    _add_corpus(p)
    p.add_argument("--predictions", nargs="+", required=_env("predictions", None) is None, default=None)
    p.add_argument("--annotations", required=_env("annotations", None) is None, default=_env("annotations", None))
    p.add_argument("--annotator", default=_env("annotator", FINAL_ANNOTATOR))
    _add_common(p)

    p = sub.add_parser("chunks", help="emit overlapping word-window chunk records")
    _add_corpus(p)
    p.add_argument("--chunk-size", type=int, default=int(_env("chunk-size", 450)))
    p.add_argument("--chunk-overlap", type=int, default=int(_env("chunk-overlap", 50)))
    p.add_argument("--min-chunk", type=int, default=int(_env("min-chunk", 20)))
    _add_common(p)

    p = sub.add_parser("aggregate-chunks", help="cluster per-chunk scores into article labels")
    p.add_argument("--scores", required=_env("scores", None) is None, default=_env("scores", None),
                   help="JSONL per-chunk negative-score records")
    _add_common(p)

    p = sub.add_parser("stats", help="corpus summary statistics")
    _add_corpus(p)
    _add_common(p)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    config = RunConfig()
    config.corpus_path = getattr(args, "corpus", None)
    config.lexicon_path = getattr(args, "lexicon", None)
    config.valence_path = getattr(args, "valence", None)
    predictions = getattr(args, "predictions", None)
    if predictions is None:
        env_preds = _env("predictions", None)
        predictions = env_preds.split(os.pathsep) if env_preds else []
    config.predictions_paths = list(predictions)
    config.annotations_path = getattr(args, "annotations", None)
    config.scores_path = getattr(args, "scores", None)
    config.output_dir = args.output_dir
    for name in ("pos_threshold", "neg_threshold", "nepl_min", "smoothing_window",
                 "agreement_k", "chunk_size", "chunk_overlap", "min_chunk", "annotator", "plots"):
        if hasattr(args, name):
            setattr(config, name, getattr(args, name))
    config.validate()
    return config


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(value) -> str:
    return f"{value:.6f}" if isinstance(value, float) else str(value)


def _validate_outputs(paths: list[Path]) -> None:
    for path in paths:
        if not path.exists() or path.stat().st_size == 0:
            raise FramelensError(f"declared output {path} was not written")
        if path.suffix == ".jsonl":
            for _ in read_jsonl(path):
                pass
        elif path.suffix == ".csv":
            with open(path, "r", encoding="utf-8", newline="") as fh:
                if not next(csv.reader(fh), None):
                    raise FramelensError(f"output {path} has no header row")


def _load_inputs(config: RunConfig, output_dir: Path) -> list[Article]:
    if not config.corpus_path:
        raise FramelensError("a corpus file is required (--corpus)")
    articles, rejected = load_corpus(config.corpus_path)
    write_jsonl(output_dir / "rejected.jsonl", rejected)
    if not articles:
        raise FramelensError(f"corpus {config.corpus_path} contains no valid articles")
    return articles


def _stats_rows(articles: list[Article]) -> tuple[list[str], list[list]]:
    stats = corpus_stats(articles)
    header = ["article_count", "sentence_count", "mean_words", "median_words", "std_words", "min_words", "max_words"]
    row = [stats.article_count, stats.sentence_count, _fmt(stats.mean_words), _fmt(stats.median_words),
           _fmt(stats.std_words), stats.min_words, stats.max_words]
    return header, [row]


def cmd_stats(config: RunConfig) -> int:
    output_dir = Path(config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    articles = _load_inputs(config, output_dir)
    header, rows = _stats_rows(articles)
    path = output_dir / "corpus_stats.csv"
    _write_csv(path, header, rows)
    _validate_outputs([path])
    return 0


def _rationale_sentences(sentences, matches) -> list[str]:
    """Sentences containing portrayal matches, capped at RATIONALE_CAP by
    match count (ties by document order), emitted in document order."""
    counts: dict[int, int] = {}
    for match in matches:
        counts[match.sentence_index] = counts.get(match.sentence_index, 0) + 1
    ranked = sorted(counts, key=lambda idx: (-counts[idx], idx))[:RATIONALE_CAP]
    return [sentences[idx].text for idx in sorted(ranked)]


def cmd_analyze(config: RunConfig) -> int:
    output_dir = Path(config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    articles = _load_inputs(config, output_dir)
    lexicon = load_lexicon(config.lexicon_path) if config.lexicon_path else default_lexicon()
    valences = load_valence_lexicon(config.valence_path) if config.valence_path else None
    scorer = CompoundScorer(valences)

    results = []
    labeled = []
    category_totals = {category: 0 for category in NEPL_CATEGORIES}
    for article in articles:
        sentences = segment_sentences(article.full_text)
        matches = match_lexicon(sentences, lexicon)
        flags, _ = category_presence(matches)
        result = classify_hybrid(
            article,
            lexicon=lexicon,
            scorer=scorer,
            pos_threshold=config.pos_threshold,
            neg_threshold=config.neg_threshold,
            nepl_min=config.nepl_min,
        )
        for category, present in flags.items():
            category_totals[category] += int(present)
        labeled.append((article, result.label))
        results.append(
            {
                "article_id": article.id,
                "label": result.label,
                "stage": result.stage,
                "compound": result.compound,
                "fear_count": result.fear_count,
                "victim_flag": result.victim_flag,
                "category_flags": flags,
                "rationale_sentences": _rationale_sentences(sentences, matches),
            }
        )

    results_path = output_dir / "results.jsonl"
    write_jsonl(results_path, results)

    stats_path = output_dir / "corpus_stats.csv"
    header, rows = _stats_rows(articles)
    _write_csv(stats_path, header, rows)

    categories_path = output_dir / "nepl_categories.csv"
    n = len(articles)
    _write_csv(
        categories_path,
        ["category", "articles", "fraction"],
        [[category, count, _fmt(count / n)] for category, count in category_totals.items()],
    )

    crosstab = victim_nepl_crosstab(articles, lexicon)
    crosstab_path = output_dir / "victim_nepl_crosstab.csv"
    _write_csv(
        crosstab_path,
        ["cell", "count", "percent"],
        [
            ["victim_and_nepl", crosstab.victim_and_nepl, _fmt(crosstab.percentages["victim_and_nepl"])],
            ["victim_only", crosstab.victim_only, _fmt(crosstab.percentages["victim_only"])],
            ["nepl_only", crosstab.nepl_only, _fmt(crosstab.percentages["nepl_only"])],
            ["neither", crosstab.neither, _fmt(crosstab.percentages["neither"])],
        ],
    )

    trends = monthly_trends(labeled, window=config.smoothing_window)
    trends_path = output_dir / "monthly_trends.csv"
    _write_csv(
        trends_path,
        ["month", "article_count", "negative_count", "negativity_rate", "smoothed_count", "smoothed_rate"],
        [
            [f"{t.month[0]:04d}-{t.month[1]:02d}", t.article_count, t.negative_count,
             _fmt(t.negativity_rate), _fmt(t.smoothed_count), _fmt(t.smoothed_rate)]
            for t in trends
        ],
    )

    outputs = [results_path, stats_path, categories_path, crosstab_path, trends_path]
    if config.plots:
        months = [f"{t.month[0]:04d}-{t.month[1]:02d}" for t in trends]
        trends_svg = output_dir / "monthly_trends.svg"
        trends_svg.write_text(
            svgplot.line_chart(
                months,
                {
                    "articles": [float(t.article_count) for t in trends],
                    "smoothed": [t.smoothed_count for t in trends],
                },
                "Monthly article counts",
            ),
            encoding="utf-8",
        )
        rates_svg = output_dir / "monthly_negativity.svg"
        rates_svg.write_text(
            svgplot.line_chart(
                months,
                {
                    "rate": [t.negativity_rate for t in trends],
                    "smoothed": [t.smoothed_rate for t in trends],
                },
                "Monthly negativity rate",
            ),
            encoding="utf-8",
        )
        categories_svg = output_dir / "nepl_categories.svg"
        categories_svg.write_text(
            svgplot.bar_chart(
                list(category_totals.keys()),
                [float(v) for v in category_totals.values()],
                "Articles containing each portrayal category",
            ),
            encoding="utf-8",
        )
        outputs += [trends_svg, rates_svg, categories_svg]
    _validate_outputs(outputs)
    return 0


def _load_predictions(config: RunConfig, articles: list[Article]):
    predictions = []
    for path in config.predictions_paths:
        predictions.extend(ingest_predictions(path, articles))
    if not predictions:
        raise FramelensError("no predictions loaded; pass --predictions")
    return predictions


def cmd_agree(config: RunConfig) -> int:
    output_dir = Path(config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    articles = _load_inputs(config, output_dir)
    predictions = _load_predictions(config, articles)
    models = sorted({p.model_id for p in predictions})
    covered_ids = {p.article_id for p in predictions}
    target_articles = [a for a in articles if a.id in covered_ids]
    summary = agreement(predictions, models, target_articles)

    histogram_path = output_dir / "agreement_vote_histogram.csv"
    _write_csv(
        histogram_path,
        ["negative_votes", "articles"],
        [[votes, summary.vote_histogram[votes]] for votes in sorted(summary.vote_histogram)],
    )
    fraction_path = output_dir / "agreement_fraction_at_least.csv"
    _write_csv(
        fraction_path,
        ["k", "fraction"],
        [[k, _fmt(summary.fraction_at_least[k])] for k in sorted(summary.fraction_at_least)],
    )
    pairwise_path = output_dir / "agreement_pairwise.csv"
    _write_csv(
        pairwise_path,
        ["model", *summary.models],
        [
            [model, *[_fmt(summary.pairwise_agreement[i][j]) for j in range(len(summary.models))]]
            for i, model in enumerate(summary.models)
        ],
    )
    distribution_path = output_dir / "model_label_distribution.csv"
    _write_csv(
        distribution_path,
        ["model", "fraction_negative", "fraction_neutral", "fraction_positive"],
        [
            [model, *[_fmt(f) for f in summary.label_distribution_per_model[model]]]
            for model in summary.models
        ],
    )
    headline_path = output_dir / "agreement_summary.csv"
    k = config.agreement_k
    fraction_at_k = summary.fraction_at_least.get(k, 0.0)
    _write_csv(
        headline_path,
        ["articles", "models", "k", "fraction_at_least_k"],
        [[summary.article_count, len(summary.models), k, _fmt(fraction_at_k)]],
    )
    _validate_outputs([histogram_path, fraction_path, pairwise_path, distribution_path, headline_path])
    return 0


def cmd_eval(config: RunConfig) -> int:
    output_dir = Path(config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    articles = _load_inputs(config, output_dir)
    predictions = _load_predictions(config, articles)
    if not config.annotations_path:
        raise FramelensError("an annotation file is required (--annotations)")
    annotations = load_annotations(config.annotations_path)
    gold = select_annotator(annotations, config.annotator)
    if not gold:
        raise FramelensError(f"no annotations by annotator {config.annotator!r}")

    outputs = []
    metric_rows = []
    overlap_rows = []
    per_article_rows = []
    models = sorted({p.model_id for p in predictions})
    gold_ids = {g.article_id for g in gold}
    for model in models:
        model_preds = [p for p in predictions if p.model_id == model and p.article_id in gold_ids]
        matrix = confusion_matrix(gold, model_preds)
        matrix_path = output_dir / f"confusion_{model}.csv"
        _write_csv(
            matrix_path,
            ["gold\\pred", "negative", "neutral", "positive"],
            [
                [("negative", "neutral", "positive")[i], *[int(matrix[i, j]) for j in range(3)]]
                for i in range(3)
            ],
        )
        outputs.append(matrix_path)
        metrics = class_metrics(matrix)
        for label, name in zip(CLASS_ORDER, ("negative", "neutral", "positive")):
            scores = metrics.per_class[label]
            metric_rows.append(
                [model, name, _fmt(scores.precision), _fmt(scores.recall), _fmt(scores.f1),
                 scores.support, _fmt(metrics.accuracy)]
            )
        if any(p.rationale_sentences for p in model_preds):
            annotators = sorted({a.annotator_id for a in annotations})
            for annotator in annotators:
                annotator_gold = [
                    g for g in select_annotator(annotations, annotator)
                    if g.justification_sentences and g.article_id in {p.article_id for p in model_preds}
                ]
                if not annotator_gold:
                    continue
                overlap = rationale_overlap(annotator_gold, [p for p in model_preds
                                                             if p.article_id in {g.article_id for g in annotator_gold}])
                overlap_rows.append([model, annotator, _fmt(overlap.bleu), _fmt(overlap.rouge_l)])
                per_article_rows.extend(
                    [model, annotator, article_id, _fmt(b), _fmt(r)] for article_id, b, r in overlap.per_article
                )

    metrics_path = output_dir / "eval_metrics.csv"
    _write_csv(metrics_path, ["model", "class", "precision", "recall", "f1", "support", "accuracy"], metric_rows)
    outputs.append(metrics_path)
    if overlap_rows:
        overlap_path = output_dir / "rationale_overlap.csv"
        _write_csv(overlap_path, ["model", "annotator", "bleu", "rouge_l"], overlap_rows)
        per_article_path = output_dir / "rationale_overlap_per_article.csv"
        _write_csv(per_article_path, ["model", "annotator", "article_id", "bleu", "rouge_l"], per_article_rows)
        outputs += [overlap_path, per_article_path]
    _validate_outputs(outputs)
    return 0


def cmd_chunks(config: RunConfig) -> int:
    output_dir = Path(config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    articles = _load_inputs(config, output_dir)
    records = []
    for article in articles:
        for chunk in chunk_words(
            article.full_text,
            size=config.chunk_size,
            overlap=config.chunk_overlap,
            min_chunk=config.min_chunk,
            article_id=article.id,
        ):
            records.append(
                {
                    "article_id": chunk.article_id,
                    "index": chunk.index,
                    "word_start": chunk.word_span[0],
                    "word_end": chunk.word_span[1],
                    "text": chunk.text,
                }
            )
    chunks_path = output_dir / "chunks.jsonl"
    write_jsonl(chunks_path, records)
    _validate_outputs([chunks_path])
    return 0


def cmd_aggregate_chunks(config: RunConfig) -> int:
    output_dir = Path(config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    if not config.scores_path:
        raise FramelensError("a chunk-score file is required (--scores)")
    pairs = []
    model_ids = set()
    for lineno, record in read_jsonl(config.scores_path):
        where = f"{config.scores_path}:{lineno}"
        try:
            article_id = str(record["article_id"])
            score = float(record["negative_score"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FramelensError(f"{where}: chunk-score record needs article_id and negative_score: {exc}") from exc
        if not 0.0 <= score <= 1.0:
            raise FramelensError(f"{where}: negative_score {score} outside [0, 1]")
        model_ids.add(str(record.get("model_id") or "chunked"))
        pairs.append((article_id, score))
    if len(model_ids) > 1:
        raise FramelensError(f"chunk-score file mixes models: {sorted(model_ids)}")
    model_id = model_ids.pop() if model_ids else "chunked"

    means = mean_chunk_scores(pairs)
    article_ids = sorted(means)
    labels = cluster_article_scores([means[a] for a in article_ids])

    scores_path = output_dir / "article_negativity.csv"
    _write_csv(
        scores_path,
        ["article_id", "mean_negative_score"],
        [[article_id, _fmt(means[article_id])] for article_id in article_ids],
    )
    predictions_path = output_dir / "chunk_cluster_predictions.jsonl"
    write_jsonl(
        predictions_path,
        [
            {"model_id": model_id, "article_id": article_id, "label": label}
            for article_id, label in zip(article_ids, labels)
        ],
    )
    _validate_outputs([scores_path, predictions_path])
    return 0


_COMMANDS = {
    "analyze": cmd_analyze,
    "agree": cmd_agree,
    "eval": cmd_eval,
    "chunks": cmd_chunks,
    "aggregate-chunks": cmd_aggregate_chunks,
    "stats": cmd_stats,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        return _COMMANDS[args.command](config)
    except FramelensError as exc:
        print(f"framelens {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"framelens {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
