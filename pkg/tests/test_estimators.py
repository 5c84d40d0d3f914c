from __future__ import annotations

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import Pipeline

from framelens import ExactKMeans1D, FramelensError, HybridSentimentClassifier, NeplFeaturizer, kmeans_1d

from conftest import make_article


class TestHybridSentimentClassifier:
    def test_fit_predict_on_texts(self):
        clf = HybridSentimentClassifier().fit()
        labels = clf.predict(
            [
                "Forest staff rescued the calf.",
                "A lone tusker charged and chased villagers before it barged into a shed.",
                "The census counted the herd.",
            ]
        )
        assert labels.tolist() == [1, -1, 0]

    def test_accepts_articles(self):
        clf = HybridSentimentClassifier().fit()
        article = make_article(body="Forest staff rescued the calf.")
        assert clf.predict([article]).tolist() == [1]

    def test_get_params_round_trip(self):
        clf = HybridSentimentClassifier(pos_threshold=0.3)
        params = clf.get_params()
        assert params["pos_threshold"] == 0.3
        cloned = clone(clf)
        assert cloned.get_params() == params

    def test_unfitted_predict_raises(self):
        with pytest.raises(FramelensError, match="fit"):
            HybridSentimentClassifier().predict(["text"])

    def test_invalid_params_rejected_at_fit(self):
        with pytest.raises(FramelensError):
            HybridSentimentClassifier(pos_threshold=-0.9).fit()

    def test_decision_function_matches_thresholds(self):
        clf = HybridSentimentClassifier().fit()
        texts = ["Forest staff rescued the calf.", "Two people were killed near the forest."]
        compounds = clf.decision_function(texts)
        labels = clf.predict(texts)
        assert (compounds[0] > 0.20) == (labels[0] == 1)
        assert (compounds[1] < -0.20) == (labels[1] == -1)

    def test_analyze_exposes_stage_fields(self):
        clf = HybridSentimentClassifier().fit()
        result = clf.analyze(["The census counted the herd."])[0]
        assert result.stage == "regex"
        assert result.fear_count == 0

    def test_non_text_inputs_rejected(self):
        clf = HybridSentimentClassifier().fit()
        with pytest.raises(FramelensError, match="expected Article or str"):
            clf.predict([42])


class TestExactKMeans1D:
    def test_fit_matches_function(self):
        values = [0.1, 0.12, 0.5, 0.52, 0.9, 0.91]
        est = ExactKMeans1D(n_clusters=3).fit(values)
        assignments, centers, sse = kmeans_1d(values, 3)
        assert est.labels_.tolist() == assignments
        assert est.cluster_centers_.reshape(-1).tolist() == pytest.approx(centers)
        assert est.inertia_ == pytest.approx(sse)

    def test_predict_assigns_nearest_center(self):
        est = ExactKMeans1D(n_clusters=2).fit([0.0, 0.1, 0.9, 1.0])
        assert est.predict([0.05, 0.95]).tolist() == [0, 1]

    def test_accepts_column_vectors(self):
        est = ExactKMeans1D(n_clusters=2).fit(np.array([[0.0], [1.0]]))
        assert sorted(est.labels_.tolist()) == [0, 1]

    def test_clone_compatible(self):
        assert clone(ExactKMeans1D(n_clusters=4)).n_clusters == 4


class TestNeplFeaturizer:
    def test_feature_matrix_shape_and_names(self):
        transformer = NeplFeaturizer().fit()
        features = transformer.transform(["The rogue tusker caused panic.", "All quiet."])
        names = transformer.get_feature_names_out()
        assert features.shape == (2, len(names))
        assert names[-2:].tolist() == ["nepl_count", "victim_flag"]

    def test_counts_and_flags(self):
        transformer = NeplFeaturizer().fit()
        row = transformer.transform(["The rogue tusker caused panic after two people were killed."])[0]
        names = transformer.get_feature_names_out().tolist()
        assert row[names.index("nepl_count")] == 2.0
        assert row[names.index("victim_flag")] == 1.0

    def test_composes_in_pipeline(self):
        pipeline = Pipeline([("nepl", NeplFeaturizer())])
        features = pipeline.fit_transform(["The rampaging herd arrived."])
        assert features.shape[0] == 1
