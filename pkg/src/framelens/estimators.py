"""Scikit-learn style estimator wrappers around the core algorithms.

These give the classifier, the clusterer, and the lexicon featurizer the
standard fit/predict/transform + get_params surface so they compose with
pipelines, grid search, and other ecosystem tooling. The underlying
functions remain importable for direct use.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, ClusterMixin, TransformerMixin

from .compound import CompoundScorer
from .corpus import Article, segment_sentences
from .lexicon import NEPL_CATEGORIES, category_presence, default_lexicon, detect_victims, match_lexicon
from .sentiment import (
    NEGATIVE_THRESHOLD,
    NEPL_PATTERN_MIN,
    POSITIVE_THRESHOLD,
    HybridResult,
    classify_hybrid,
    kmeans_1d,
)
from .utils import FramelensError


def _as_texts(X) -> list[str]:
    """Validate an iterable of articles or strings into a list of texts."""
    texts = []
    for item in X:
        if isinstance(item, Article):
            texts.append(item.full_text)
        elif isinstance(item, str):
            texts.append(item)
        else:
            raise FramelensError(f"expected Article or str inputs, got {type(item).__name__}")
    return texts


class HybridSentimentClassifier(BaseEstimator, ClassifierMixin):
    """Two-stage rule classifier over article texts.

    fit() only binds the lexicon and scorer resources (no training data is
    consumed); predict() maps each text to a label in {-1, 0, +1}.
    """

    def __init__(
        self,
        pos_threshold: float = POSITIVE_THRESHOLD,
        neg_threshold: float = NEGATIVE_THRESHOLD,
        nepl_min: int = NEPL_PATTERN_MIN,
    ):
        self.pos_threshold = pos_threshold
        self.neg_threshold = neg_threshold
        self.nepl_min = nepl_min

    def fit(self, X=None, y=None):
        if self.pos_threshold <= self.neg_threshold:
            raise FramelensError("pos_threshold must exceed neg_threshold")
        if self.nepl_min < 1:
            raise FramelensError("nepl_min must be >= 1")
        self.lexicon_ = default_lexicon()
        self.scorer_ = CompoundScorer()
        self.classes_ = np.array([-1, 0, 1])
        return self

    def _check_fitted(self):
        if not hasattr(self, "scorer_"):
            raise FramelensError("estimator is not fitted; call fit() first")

    def analyze(self, X) -> list[HybridResult]:
        self._check_fitted()
        return [
            classify_hybrid(
                text,
                lexicon=self.lexicon_,
                scorer=self.scorer_,
                pos_threshold=self.pos_threshold,
                neg_threshold=self.neg_threshold,
                nepl_min=self.nepl_min,
            )
            for text in _as_texts(X)
        ]

    def predict(self, X) -> np.ndarray:
        return np.array([result.label for result in self.analyze(X)], dtype=np.int64)

    def decision_function(self, X) -> np.ndarray:
        """Compound scores, the stage-one quantity the thresholds act on."""
        self._check_fitted()
        return np.array([self.scorer_.score(text) for text in _as_texts(X)])


class ExactKMeans1D(BaseEstimator, ClusterMixin):
    """Exact one-dimensional k-means solved by dynamic programming.

    Deterministic and globally optimal, so no seeding or restarts are
    involved. cluster_centers_ are sorted ascending and labels_ index them.
    """

    def __init__(self, n_clusters: int = 3):
        self.n_clusters = n_clusters

    def fit(self, X, y=None):
        values = np.asarray(X, dtype=float).reshape(-1)
        if values.size == 0:
            raise FramelensError("ExactKMeans1D requires at least one value")
        assignments, centers, sse = kmeans_1d(values.tolist(), self.n_clusters)
        self.labels_ = np.array(assignments, dtype=np.int64)
        self.cluster_centers_ = np.array(centers).reshape(-1, 1)
        self.inertia_ = sse
        return self

    def predict(self, X) -> np.ndarray:
        if not hasattr(self, "cluster_centers_"):
            raise FramelensError("estimator is not fitted; call fit() first")
        values = np.asarray(X, dtype=float).reshape(-1, 1)
        distances = np.abs(values - self.cluster_centers_.reshape(1, -1))
        return distances.argmin(axis=1)


class NeplFeaturizer(BaseEstimator, TransformerMixin):
    """Per-text portrayal features: category flags, occurrence count, victim flag."""

    def fit(self, X=None, y=None):
        self.lexicon_ = default_lexicon()
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "lexicon_"):
            raise FramelensError("estimator is not fitted; call fit() first")
        rows = []
        for text in _as_texts(X):
            sentences = segment_sentences(text)
            flags, count = category_presence(match_lexicon(sentences, self.lexicon_))
            victim = detect_victims(sentences).victim_flag
            rows.append([float(flags[c]) for c in NEPL_CATEGORIES] + [float(count), float(victim)])
        return np.array(rows, dtype=float)

    def get_feature_names_out(self, input_features=None):
        names = [f"category_{c.lower().replace(' ', '_').replace('/', '_')}" for c in NEPL_CATEGORIES]
        return np.array(names + ["nepl_count", "victim_flag"], dtype=object)
