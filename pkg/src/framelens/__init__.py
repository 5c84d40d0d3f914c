"""framelens: quantifies how news coverage frames elephants in
human-elephant conflict reporting.

Core pieces: article cleaning and segmentation, the six-category negative
portrayal lexicon and matcher, a hybrid compound-score/pattern sentiment
classifier, cross-model agreement analysis, expert-annotation evaluation with
BLEU/ROUGE-L rationale overlap, and monthly trend reports. Estimator-style
wrappers in `framelens.estimators` expose the algorithms through the
scikit-learn fit/predict/transform protocol.
"""

from .compound import CompoundScorer, compound_score, default_valence_lexicon, load_valence_lexicon
from .corpus import (
    Article,
    ArticleValidationError,
    Chunk,
    CorpusStats,
    RelevanceParseError,
    Sentence,
    chunk_words,
    clean_article,
    corpus_stats,
    load_corpus,
    parse_relevance_response,
    segment_sentences,
)
from .ensemble import AgreementSummary, ModelPrediction, agreement, ingest_predictions
from .estimators import ExactKMeans1D, HybridSentimentClassifier, NeplFeaturizer
from .evaluation import (
    ClassMetrics,
    ClassScores,
    GoldAnnotation,
    OverlapScores,
    bleu,
    class_metrics,
    confusion_matrix,
    disagreement_breakdown,
    load_annotations,
    rationale_overlap,
    rouge_l,
)
from .lexicon import (
    NEPL_CATEGORIES,
    Lexicon,
    LexiconLoadError,
    LexiconMatch,
    VictimReport,
    category_presence,
    default_lexicon,
    detect_victims,
    load_lexicon,
    match_lexicon,
)
from .sentiment import (
    FIVE_CLASSES,
    HybridResult,
    classify_hybrid,
    cluster_article_scores,
    decide_hybrid_label,
    kmeans_1d,
    map_five_to_three,
    map_probabilities,
)
from .trends import MonthlyTrend, VictimNeplCrosstab, monthly_trends, victim_nepl_crosstab
from .utils import ConfigurationError, FramelensError

__version__ = "0.1.0"

__all__ = [
    "AgreementSummary",
    "Article",
    "ArticleValidationError",
    "Chunk",
    "ClassMetrics",
    "ClassScores",
    "CompoundScorer",
    "ConfigurationError",
    "CorpusStats",
    "ExactKMeans1D",
    "FIVE_CLASSES",
    "FramelensError",
    "GoldAnnotation",
    "HybridResult",
    "HybridSentimentClassifier",
    "Lexicon",
    "LexiconLoadError",
    "LexiconMatch",
    "ModelPrediction",
    "MonthlyTrend",
    "NEPL_CATEGORIES",
    "NeplFeaturizer",
    "OverlapScores",
    "RelevanceParseError",
    "Sentence",
    "VictimNeplCrosstab",
    "VictimReport",
    "agreement",
    "bleu",
    "category_presence",
    "chunk_words",
    "class_metrics",
    "classify_hybrid",
    "clean_article",
    "cluster_article_scores",
    "decide_hybrid_label",
    "compound_score",
    "confusion_matrix",
    "corpus_stats",
    "default_lexicon",
    "default_valence_lexicon",
    "detect_victims",
    "disagreement_breakdown",
    "ingest_predictions",
    "kmeans_1d",
    "load_annotations",
    "load_corpus",
    "load_lexicon",
    "load_valence_lexicon",
    "map_five_to_three",
    "map_probabilities",
    "match_lexicon",
    "monthly_trends",
    "parse_relevance_response",
    "rationale_overlap",
    "rouge_l",
    "segment_sentences",
    "victim_nepl_crosstab",
]
