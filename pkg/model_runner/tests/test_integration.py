"""Round-trips across the file interfaces shared with the analysis toolkit.

These tests drive the runner with the deterministic mock backend and then
hand its output files to the framelens package, asserting they are accepted
exactly as emitted.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import pytest

import framelens
from framelens.cli import main as framelens_main
from framelens_runner.backends import BackendSpec, MockBackend
from framelens_runner.cli import main as runner_main
from framelens_runner.prompts import render_relevance_prompt
from framelens_runner.runner import read_jsonl, run_backend, write_jsonl

FIXTURE10 = Path(__file__).resolve().parents[2] / "tests" / "data" / "fixture10.jsonl"


@pytest.fixture(scope="module")
def fixture_records():
    return read_jsonl(FIXTURE10)


@pytest.fixture(scope="module")
def fixture_articles():
    articles, rejected = framelens.load_corpus(FIXTURE10)
    assert not rejected
    return articles


class TestPredictionFileAcceptance:
    @pytest.mark.parametrize("backend_id", ["llm_gemini_style", "llm_qwen_style"])
    def test_llm_outputs_ingest_with_zero_warnings(
        self, backend_id, fixture_records, fixture_articles, tmp_path, caplog
    ):
        spec = BackendSpec(backend_id=backend_id)
        outputs, stats = run_backend(spec, fixture_records)
        assert stats.failed == 0
        path = tmp_path / "preds.jsonl"
        write_jsonl(path, outputs)
        with caplog.at_level(logging.WARNING, logger="framelens.ensemble"):
            predictions = framelens.ingest_predictions(path, fixture_articles)
        assert len(predictions) == len(fixture_records)
        assert caplog.records == []

    def test_rationales_survive_subheadline_dedup(self, fixture_records, fixture_articles, tmp_path, caplog):
        # f07 carries a subheadline duplicated at the body head; the emitted
        # rationales must still be verbatim in the cleaned full text.
        record = next(r for r in fixture_records if r["id"] == "f07")
        spec = BackendSpec(backend_id="llm_gemini_style")
        outputs, stats = run_backend(spec, [record])
        assert stats.failed == 0 and outputs[0]["rationale_sentences"]
        path = tmp_path / "preds.jsonl"
        write_jsonl(path, outputs)
        with caplog.at_level(logging.WARNING, logger="framelens.ensemble"):
            predictions = framelens.ingest_predictions(path, fixture_articles)
        assert caplog.records == []
        assert predictions[0].rationale_sentences == tuple(outputs[0]["rationale_sentences"])

    def test_five_class_outputs_harmonized_by_toolkit(self, fixture_records, fixture_articles, tmp_path):
        spec = BackendSpec(backend_id="longformer_style")
        outputs, stats = run_backend(spec, fixture_records)
        assert stats.failed == 0
        path = tmp_path / "five_class.jsonl"
        write_jsonl(path, outputs)
        predictions = framelens.ingest_predictions(path, fixture_articles)
        emitted = {out["article_id"]: out["five_class"] for out in outputs}
        for prediction in predictions:
            assert prediction.label == framelens.map_five_to_three(emitted[prediction.article_id])


class TestChunkScoreRoundTrip:
    def test_chunks_scored_and_aggregated(self, tmp_path):
        chunk_dir = tmp_path / "chunks_out"
        assert framelens_main(["chunks", "--corpus", str(FIXTURE10), "--output-dir", str(chunk_dir)]) == 0
        chunks_path = chunk_dir / "chunks.jsonl"

        scores_path = tmp_path / "scores.jsonl"
        code = runner_main(
            [
                "run", "--backend", "roberta_chunked",
                "--input", str(chunks_path), "--output", str(scores_path),
            ]
        )
        assert code == 0
        score_records = read_jsonl(scores_path)
        assert {(r["article_id"], r["chunk_index"]) for r in score_records} == {
            (r["article_id"], r["index"]) for r in read_jsonl(chunks_path)
        }

        aggregate_dir = tmp_path / "aggregated"
        assert framelens_main(
            ["aggregate-chunks", "--scores", str(scores_path), "--output-dir", str(aggregate_dir)]
        ) == 0
        labels = {
            record["article_id"]: record["label"]
            for record in read_jsonl(aggregate_dir / "chunk_cluster_predictions.jsonl")
        }
        assert set(labels.values()) <= {-1, 0, 1}
        assert len(labels) == 10


class TestRelevanceRoundTrip:
    def test_render_mock_parse(self, fixture_records):
        record = next(r for r in fixture_records if r["id"] == "f01")  # conflict-heavy article
        prompt = render_relevance_prompt(record)
        response = MockBackend().infer(prompt, "relevance")
        relevant, locations = framelens.parse_relevance_response(response)
        assert relevant is True
        assert locations == ["Hassan", "Karnataka"]

    def test_irrelevant_article_round_trip(self):
        record = {
            "id": "x1",
            "title": "Municipal budget session concludes",
            "subheadline": "",
            "body": "The municipal budget session concluded on Friday. Members approved the roads plan.",
        }
        prompt = render_relevance_prompt(record)
        response = MockBackend().infer(prompt, "relevance")
        relevant, locations = framelens.parse_relevance_response(response)
        assert relevant is False
        assert locations == []

    def test_cli_relevance_responses_parse(self, tmp_path, fixture_records):
        articles_path = tmp_path / "articles.jsonl"
        write_jsonl(articles_path, fixture_records)
        output = tmp_path / "relevance.jsonl"
        assert runner_main(["relevance", "--input", str(articles_path), "--output", str(output)]) == 0
        for record in read_jsonl(output):
            relevant, locations = framelens.parse_relevance_response(record["response"])
            assert isinstance(relevant, bool)
            assert isinstance(locations, list)
