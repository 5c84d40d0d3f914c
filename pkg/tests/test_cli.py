from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import pytest

from framelens.cli import main
from framelens.utils import read_jsonl

from conftest import DATA_DIR
from oracles import exhaustive_kmeans_labelings, stats_by_hand

FIXTURE10 = DATA_DIR / "fixture10.jsonl"
SYNTHETIC25 = DATA_DIR / "synthetic25.jsonl"


def run(*argv) -> int:
    return main([str(a) for a in argv])


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def jsonl_records(path):
    return [record for _, record in read_jsonl(path)]


class TestAnalyze:
    def test_fixture10_outputs(self, tmp_path):
        out = tmp_path / "reports"
        assert run("analyze", "--corpus", FIXTURE10, "--output-dir", out) == 0
        results = jsonl_records(out / "results.jsonl")
        assert len(results) == 10
        for name in ("corpus_stats.csv", "nepl_categories.csv", "victim_nepl_crosstab.csv", "monthly_trends.csv"):
            assert (out / name).exists()

    def test_fixture10_determinism_byte_identical(self, tmp_path):
        first = tmp_path / "run1"
        second = tmp_path / "run2"
        assert run("analyze", "--corpus", FIXTURE10, "--output-dir", first, "--plots") == 0
        assert run("analyze", "--corpus", FIXTURE10, "--output-dir", second, "--plots") == 0
        names = sorted(p.name for p in first.iterdir())
        assert names == sorted(p.name for p in second.iterdir())
        for name in names:
            assert (first / name).read_bytes() == (second / name).read_bytes(), name

    def test_empty_corpus_fails(self, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("", encoding="utf-8")
        assert run("analyze", "--corpus", empty, "--output-dir", tmp_path / "out") != 0

    def test_missing_lexicon_fails_naming_path(self, tmp_path, capsys):
        missing = tmp_path / "nope.txt"
        code = run("analyze", "--corpus", FIXTURE10, "--lexicon", missing, "--output-dir", tmp_path / "out")
        assert code != 0
        assert "nope.txt" in capsys.readouterr().err

    def test_rejected_records_logged(self, tmp_path):
        corpus = tmp_path / "corpus.jsonl"
        rows = [
            {"id": "ok", "title": "Fine", "body": "Text.", "publish_date": "2024-01-01"},
            {"id": "bad", "title": "", "body": "x", "publish_date": "2024-01-02"},
        ]
        corpus.write_text("\n".join(json.dumps(r) for r in rows), encoding="utf-8")
        out = tmp_path / "out"
        assert run("analyze", "--corpus", corpus, "--output-dir", out) == 0
        rejected = jsonl_records(out / "rejected.jsonl")
        assert len(rejected) == 1 and rejected[0]["reason"] == "empty title"

    def test_env_override_changes_pattern_threshold(self, tmp_path, monkeypatch):
        out_default = tmp_path / "default"
        assert run("analyze", "--corpus", FIXTURE10, "--output-dir", out_default) == 0
        monkeypatch.setenv("FRAMELENS_NEPL_MIN", "99")
        out_env = tmp_path / "env"
        assert run("analyze", "--corpus", FIXTURE10, "--output-dir", out_env) == 0
        by_id = {r["article_id"]: r for r in jsonl_records(out_default / "results.jsonl")}
        by_id_env = {r["article_id"]: r for r in jsonl_records(out_env / "results.jsonl")}
        assert by_id["f01"]["label"] == -1 and by_id["f01"]["stage"] == "regex"
        assert by_id_env["f01"]["label"] == 0


# Hand-derived expectations for the synthetic corpus: labels/stages from the
# threshold rule applied to hand-summed token valences, pattern counts from
# manual lexicon lookup, victim flags from the victim-term/negation rules.
SYNTHETIC_EXPECTED = {
    "s01": (-1, "regex", 5, False), "s02": (-1, "compound", 0, True),
    "s03": (-1, "compound", 3, True), "s04": (1, "compound", 0, False),
    "s05": (0, "regex", 0, False), "s06": (-1, "regex", 5, False),
    "s07": (-1, "compound", 0, False), "s08": (0, "regex", 2, False),
    "s09": (1, "compound", 0, False), "s10": (-1, "regex", 4, False),
    "s11": (-1, "compound", 2, True), "s12": (0, "regex", 2, False),
    "s13": (-1, "regex", 3, False), "s14": (0, "regex", 0, False),
    "s15": (1, "compound", 0, False), "s16": (-1, "regex", 5, False),
    "s17": (-1, "compound", 0, True), "s18": (-1, "compound", 3, False),
    "s19": (-1, "regex", 3, False), "s20": (0, "regex", 0, False),
    "s21": (1, "compound", 0, False), "s22": (-1, "regex", 4, False),
    "s23": (0, "regex", 0, False), "s24": (1, "compound", 2, False),
    "s25": (-1, "compound", 0, False),
}

# Hand-summed raw valence totals per article (0.0 = no valence tokens).
SYNTHETIC_RAW_SUMS = {
    "s01": 0.0, "s02": -5.2, "s03": -2.8, "s04": 4.4, "s05": 0.0,
    "s06": 0.0, "s07": -5.2, "s08": 0.0, "s09": 2.0, "s10": 0.0,
    "s11": -13.6, "s12": -0.052, "s13": 0.0, "s14": 0.0, "s15": 7.4,
    "s16": 0.0, "s17": -11.8, "s18": -9.6, "s19": 0.0, "s20": 0.0,
    "s21": 6.2, "s22": 0.0, "s23": 0.0, "s24": 1.924, "s25": -8.9,
}


@pytest.fixture(scope="module")
def reports(tmp_path_factory):
    out = tmp_path_factory.mktemp("synthetic_reports")
    assert run("analyze", "--corpus", SYNTHETIC25, "--output-dir", out) == 0
    return out


class TestSyntheticCorpusEndToEnd:

    def test_per_article_results_match_hand_computation(self, reports):
        results = {r["article_id"]: r for r in jsonl_records(reports / "results.jsonl")}
        assert len(results) == 25
        for article_id, (label, stage, fear, victim) in SYNTHETIC_EXPECTED.items():
            row = results[article_id]
            assert (row["label"], row["stage"], row["fear_count"], row["victim_flag"]) == (
                label, stage, fear, victim,
            ), article_id
            raw = SYNTHETIC_RAW_SUMS[article_id]
            expected_compound = raw / math.sqrt(raw * raw + 15.0) if raw else 0.0
            assert row["compound"] == pytest.approx(expected_compound, abs=1e-9), article_id

    def test_monthly_trends_match_hand_computation(self, reports):
        rows = read_csv(reports / "monthly_trends.csv")
        months = [r["month"] for r in rows]
        assert months == ["2023-01", "2023-02", "2023-03", "2023-04", "2023-05", "2023-06"]
        assert [int(r["article_count"]) for r in rows] == [5, 4, 6, 0, 6, 4]
        assert [int(r["negative_count"]) for r in rows] == [3, 2, 3, 0, 4, 2]
        expected_rates = [0.6, 0.5, 0.5, 0.0, 2 / 3, 0.5]
        expected_smoothed_counts = [5.0, 4.5, 5.0, 10 / 3, 4.0, 10 / 3]
        expected_smoothed_rates = [0.6, 0.55, 1.6 / 3, 1 / 3, (0.5 + 0 + 2 / 3) / 3, (0 + 2 / 3 + 0.5) / 3]
        for row, rate, s_count, s_rate in zip(rows, expected_rates, expected_smoothed_counts, expected_smoothed_rates):
            assert float(row["negativity_rate"]) == pytest.approx(rate, abs=1e-6)
            assert float(row["smoothed_count"]) == pytest.approx(s_count, abs=1e-6)
            assert float(row["smoothed_rate"]) == pytest.approx(s_rate, abs=1e-6)

    def test_crosstab_matches_hand_computation(self, reports):
        rows = {r["cell"]: r for r in read_csv(reports / "victim_nepl_crosstab.csv")}
        assert int(rows["victim_and_nepl"]["count"]) == 2
        assert int(rows["victim_only"]["count"]) == 2
        assert int(rows["nepl_only"]["count"]) == 11
        assert int(rows["neither"]["count"]) == 10
        assert float(rows["nepl_only"]["percent"]) == pytest.approx(44.0, abs=1e-6)

    def test_category_prevalence_matches_hand_computation(self, reports):
        rows = {r["category"]: int(r["articles"]) for r in read_csv(reports / "nepl_categories.csv")}
        assert rows == {
            "Aggression and Violence": 5,
            "Intrusion and Invasion": 1,
            "Destruction and Damage": 4,
            "Fear and Panic": 4,
            "Metaphorical/Anthropomorphic Labels": 6,
            "Conflict and Hostility": 8,
        }

    def test_corpus_stats_match_spreadsheet_oracle(self, reports):
        texts = []
        for record in jsonl_records(SYNTHETIC25):
            parts = [record["title"], record["subheadline"], record["body"]]
            texts.append("\n".join(p for p in parts if p))
        mean, median, std, lo, hi = stats_by_hand([len(t.split()) for t in texts])
        row = read_csv(reports / "corpus_stats.csv")[0]
        assert int(row["article_count"]) == 25
        assert int(row["sentence_count"]) == 50  # two sentences per article, titles merge forward
        assert float(row["mean_words"]) == pytest.approx(mean, abs=1e-6)
        assert float(row["median_words"]) == pytest.approx(median, abs=1e-6)
        assert float(row["std_words"]) == pytest.approx(std, abs=1e-6)
        assert (int(row["min_words"]), int(row["max_words"])) == (lo, hi)

    def test_rationales_are_lexicon_grounded(self, reports):
        results = {r["article_id"]: r for r in jsonl_records(reports / "results.jsonl")}
        assert results["s05"]["rationale_sentences"] == []
        assert len(results["s01"]["rationale_sentences"]) >= 1
        assert any("tusker" in s for s in results["s01"]["rationale_sentences"])
        for row in results.values():
            assert len(row["rationale_sentences"]) <= 5


class TestStats:
    def test_stats_only(self, tmp_path):
        out = tmp_path / "out"
        assert run("stats", "--corpus", FIXTURE10, "--output-dir", out) == 0
        row = read_csv(out / "corpus_stats.csv")[0]
        assert int(row["article_count"]) == 10


class TestChunks:
    def make_corpus(self, tmp_path, body_words, title="Chunk test corpus title"):
        corpus = tmp_path / "chunk_corpus.jsonl"
        body = " ".join(f"w{i}" for i in range(body_words))
        corpus.write_text(
            json.dumps(
                {"id": "long1", "title": title, "body": body, "publish_date": "2024-04-01", "subheadline": ""}
            )
            + "\n",
            encoding="utf-8",
        )
        return corpus

    def test_900_word_article_three_chunks(self, tmp_path):
        # title contributes 4 words; body 896 -> full text 900 words
        corpus = self.make_corpus(tmp_path, 896, title="Nine hundred word piece")
        out = tmp_path / "out"
        assert run("chunks", "--corpus", corpus, "--output-dir", out) == 0
        records = jsonl_records(out / "chunks.jsonl")
        assert [(r["word_start"], r["word_end"]) for r in records] == [(0, 450), (400, 850), (800, 900)]

    def test_short_article_single_chunk(self, tmp_path):
        corpus = self.make_corpus(tmp_path, 6)
        out = tmp_path / "out"
        assert run("chunks", "--corpus", corpus, "--output-dir", out) == 0
        records = jsonl_records(out / "chunks.jsonl")
        assert len(records) == 1 and records[0]["word_start"] == 0


class TestAggregateChunks:
    def test_labels_match_exhaustive_oracle(self, tmp_path):
        means = {"a1": 0.1, "a2": 0.1, "a3": 0.5, "a4": 0.5, "a5": 0.9, "a6": 0.9}
        scores = tmp_path / "scores.jsonl"
        with open(scores, "w", encoding="utf-8") as fh:
            for article_id, mean in means.items():
                for delta in (-0.05, 0.05):
                    fh.write(
                        json.dumps(
                            {
                                "model_id": "chunked",
                                "article_id": article_id,
                                "chunk_index": 0 if delta < 0 else 1,
                                "negative_score": round(mean + delta, 6),
                            }
                        )
                        + "\n"
                    )
        out = tmp_path / "out"
        assert run("aggregate-chunks", "--scores", scores, "--output-dir", out) == 0
        predictions = {r["article_id"]: r["label"] for r in jsonl_records(out / "chunk_cluster_predictions.jsonl")}
        ordered_ids = sorted(means)
        _, labelings = exhaustive_kmeans_labelings([means[a] for a in ordered_ids])
        assert tuple(predictions[a] for a in ordered_ids) in labelings
        assert predictions == {"a1": 1, "a2": 1, "a3": 0, "a4": 0, "a5": -1, "a6": -1}

    def test_out_of_range_score_fails(self, tmp_path):
        scores = tmp_path / "scores.jsonl"
        scores.write_text(
            json.dumps({"model_id": "m", "article_id": "a", "chunk_index": 0, "negative_score": 1.5}) + "\n",
            encoding="utf-8",
        )
        assert run("aggregate-chunks", "--scores", scores, "--output-dir", tmp_path / "out") != 0


def write_fixture_predictions(path, labels_by_model):
    with open(path, "w", encoding="utf-8") as fh:
        for model, labels in labels_by_model.items():
            for article_id, label in labels.items():
                fh.write(json.dumps({"model_id": model, "article_id": article_id, "label": label}) + "\n")


HYBRID_F10 = {
    "f01": -1, "f02": 1, "f03": -1, "f04": -1, "f05": 0,
    "f06": 1, "f07": -1, "f08": -1, "f09": 1, "f10": -1,
}


class TestAgree:
    def test_histogram_and_pairwise(self, tmp_path):
        predictions_path = tmp_path / "preds.jsonl"
        write_fixture_predictions(
            predictions_path,
            {
                "mA": HYBRID_F10,
                "mB": {a: -1 for a in HYBRID_F10},
                "mC": {a: 0 for a in HYBRID_F10},
            },
        )
        out = tmp_path / "out"
        assert run("agree", "--corpus", FIXTURE10, "--predictions", predictions_path, "--output-dir", out) == 0
        histogram = {int(r["negative_votes"]): int(r["articles"]) for r in read_csv(out / "agreement_vote_histogram.csv")}
        assert histogram == {0: 0, 1: 4, 2: 6, 3: 0}
        fractions = {int(r["k"]): float(r["fraction"]) for r in read_csv(out / "agreement_fraction_at_least.csv")}
        assert fractions[0] == 1.0 and fractions[1] == 1.0
        assert fractions[2] == pytest.approx(0.6)
        assert fractions[3] == 0.0
        pairwise = read_csv(out / "agreement_pairwise.csv")
        by_model = {r["model"]: r for r in pairwise}
        assert float(by_model["mA"]["mA"]) == 1.0
        assert float(by_model["mA"]["mB"]) == pytest.approx(0.6)
        assert float(by_model["mA"]["mC"]) == pytest.approx(0.1)
        distribution = {r["model"]: r for r in read_csv(out / "model_label_distribution.csv")}
        assert float(distribution["mB"]["fraction_negative"]) == 1.0

    def test_missing_coverage_fails(self, tmp_path):
        predictions_path = tmp_path / "preds.jsonl"
        partial = dict(list(HYBRID_F10.items())[:5])
        write_fixture_predictions(predictions_path, {"mA": HYBRID_F10, "mB": partial})
        out = tmp_path / "out"
        assert run("agree", "--corpus", FIXTURE10, "--predictions", predictions_path, "--output-dir", out) != 0


class TestEval:
    def test_metrics_and_overlap(self, tmp_path):
        annotations_path = tmp_path / "gold.jsonl"
        gold_rows = [
            {"article_id": "f01", "label": -1, "intensity": 8, "annotator_id": "final",
             "justification_sentences": ["A lone tusker charged at villagers on Monday."]},
            {"article_id": "f02", "label": 1, "intensity": 2, "annotator_id": "final",
             "justification_sentences": ["Forest staff rescued a calf from an open well."]},
            {"article_id": "f05", "label": 0, "intensity": 1, "annotator_id": "final",
             "justification_sentences": ["The annual census recorded stable elephant numbers across the reserve."]},
        ]
        annotations_path.write_text("\n".join(json.dumps(r) for r in gold_rows), encoding="utf-8")
        predictions_path = tmp_path / "preds.jsonl"
        prediction_rows = [
            {"model_id": "hybrid", "article_id": "f01", "label": -1,
             "rationale_sentences": ["A lone tusker charged at villagers on Monday."]},
            {"model_id": "hybrid", "article_id": "f02", "label": 1,
             "rationale_sentences": ["Forest staff rescued a calf from an open well."]},
            {"model_id": "hybrid", "article_id": "f05", "label": -1,
             "rationale_sentences": ["The annual census recorded stable elephant numbers across the reserve."]},
        ]
        predictions_path.write_text("\n".join(json.dumps(r) for r in prediction_rows), encoding="utf-8")
        out = tmp_path / "out"
        code = run(
            "eval", "--corpus", FIXTURE10, "--predictions", predictions_path,
            "--annotations", annotations_path, "--output-dir", out,
        )
        assert code == 0
        metrics = read_csv(out / "eval_metrics.csv")
        accuracy = float(metrics[0]["accuracy"])
        assert accuracy == pytest.approx(2 / 3, abs=1e-6)
        matrix_rows = read_csv(out / "confusion_hybrid.csv")
        assert int(matrix_rows[1]["negative"]) == 1  # gold neutral predicted negative
        overlap = read_csv(out / "rationale_overlap.csv")
        assert float(overlap[0]["bleu"]) == pytest.approx(1.0)
        assert float(overlap[0]["rouge_l"]) == pytest.approx(1.0)

    def test_missing_gold_coverage_fails(self, tmp_path):
        annotations_path = tmp_path / "gold.jsonl"
        annotations_path.write_text(
            json.dumps({"article_id": "f01", "label": -1, "intensity": 5, "annotator_id": "final"}) + "\n"
            + json.dumps({"article_id": "f02", "label": 1, "intensity": 5, "annotator_id": "final"}),
            encoding="utf-8",
        )
        predictions_path = tmp_path / "preds.jsonl"
        predictions_path.write_text(
            json.dumps({"model_id": "hybrid", "article_id": "f01", "label": -1}), encoding="utf-8"
        )
        out = tmp_path / "out"
        assert run(
            "eval", "--corpus", FIXTURE10, "--predictions", predictions_path,
            "--annotations", annotations_path, "--output-dir", out,
        ) != 0
