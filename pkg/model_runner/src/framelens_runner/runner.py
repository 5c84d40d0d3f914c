"""Bounded-parallel backend execution over article or chunk records.

One output record per input record, written in input order regardless of
worker scheduling. Unparseable or failing calls are retried once; a record
that still fails is emitted with `failed: true` and the raw output preserved
so downstream ingestion can skip it with a diagnostic.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .backends import (
    BACKEND_IDS,
    FIVE_CLASS_LABELS,
    TASK_CHUNK_SCORE,
    TASK_CLASSIFY,
    TASK_FIVE_CLASS,
    TASK_RELEVANCE,
    BackendError,
    BackendSpec,
    backend_for,
)
from .prompts import GEMINI_CLASSIFY, QWEN_CLASSIFY, RELEVANCE

logger = logging.getLogger(__name__)

DEFAULT_WORKERS = 10

LABEL_BY_NAME = {"negative": -1, "neutral": 0, "positive": 1}


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class RunStats:
    total: int
    failed: int

    @property
    def failure_rate(self) -> float:
        return self.failed / self.total if self.total else 0.0


# Separator punctuation that may remain between a removed subheadline prefix
# and the rest of the body.
_PREFIX_SEPARATORS = " \t\r\n.,:;|-–—"


def _strip_duplicated_prefix(body: str, subheadline: str) -> str:
    """Drop the subheadline from the body head, per the corpus convention.

    Comparison is case-insensitive with whitespace runs treated as single
    separators, and the match must end at a word boundary. This mirrors how
    the analysis toolkit constructs article text from the same records, so
    rationale sentences stay verbatim across the file interface.
    """
    want = " ".join(subheadline.split()).lower()
    if not want:
        return body
    i = 0
    n = len(body)
    for ch in want:
        if ch == " ":
            if i >= n or not body[i].isspace():
                return body
            while i < n and body[i].isspace():
                i += 1
        else:
            if i >= n or body[i].lower() != ch:
                return body
            i += 1
    if i < n and body[i].isalnum():
        return body
    return body[i:].lstrip(_PREFIX_SEPARATORS)


def _article_text(record: dict) -> str:
    title = str(record.get("title") or "").strip()
    subheadline = str(record.get("subheadline") or "").strip()
    body = str(record.get("body") or "").strip()
    if subheadline and body:
        body = _strip_duplicated_prefix(body, subheadline)
    return "\n".join(part for part in (title, subheadline, body) if part)


def _truncate(text: str, limit: int) -> str:
    tokens = text.split()
    if len(tokens) <= limit:
        return text
    return " ".join(tokens[:limit])


def _parse_json_object(raw: str) -> dict:
    try:
        parsed = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"output is not JSON: {exc}") from exc
    if not isinstance(parsed, dict):
        raise ParseError("output JSON is not an object")
    return parsed


def _label_from_name(value: object) -> int:
    name = str(value).strip().lower()
    if name not in LABEL_BY_NAME:
        raise ParseError(f"unknown sentiment label {value!r}")
    return LABEL_BY_NAME[name]


def _parse_gemini(record: dict, raw: str, spec: BackendSpec) -> dict:
    parsed = _parse_json_object(raw)
    missing = [key for key in GEMINI_CLASSIFY.schema_keys if key not in parsed]
    if missing:
        raise ParseError(f"missing keys {missing}")
    sentences = parsed["supporting_sentences"]
    if not isinstance(sentences, list):
        raise ParseError("supporting_sentences must be a list")
    return {
        "model_id": spec.effective_model_id,
        "article_id": record["id"],
        "label": _label_from_name(parsed["sentiment"]),
        "rationale_sentences": [str(s) for s in sentences],
        "raw": raw,
    }


def _parse_qwen(record: dict, raw: str, spec: BackendSpec) -> dict:
    parsed = _parse_json_object(raw)
    missing = [key for key in QWEN_CLASSIFY.schema_keys if key not in parsed]
    if missing:
        raise ParseError(f"missing keys {missing}")
    confidence = float(parsed["confidence"])
    if not 0.0 <= confidence <= 1.0:
        raise ParseError(f"confidence {confidence} outside [0, 1]")
    return {
        "model_id": spec.effective_model_id,
        "article_id": record["id"],
        "label": _label_from_name(parsed["classification"]),
        "confidence": confidence,
        "reasoning": str(parsed["reasoning"]),
        "raw": raw,
    }


def _parse_five_class(record: dict, raw: str, spec: BackendSpec) -> dict:
    label = raw.strip().lower().replace("_", " ")
    if label not in FIVE_CLASS_LABELS:
        raise ParseError(f"unknown five-class label {raw!r}")
    return {
        "model_id": spec.effective_model_id,
        "article_id": record["id"],
        "five_class": label.replace(" ", "_"),
        "raw": raw,
    }


def _parse_chunk_score(record: dict, raw: str, spec: BackendSpec) -> dict:
    try:
        score = float(raw.strip())
    except ValueError as exc:
        raise ParseError(f"chunk score is not a number: {raw!r}") from exc
    if not 0.0 <= score <= 1.0:
        raise ParseError(f"chunk score {score} outside [0, 1]")
    return {
        "model_id": spec.effective_model_id,
        "article_id": record["article_id"],
        "chunk_index": int(record["index"]),
        "negative_score": score,
    }


def _request_for(spec: BackendSpec, record: dict) -> tuple[str, str]:
    """(request_text, task) for one input record under this backend."""
    if spec.backend_id == "llm_gemini_style":
        text = _truncate(_article_text(record), spec.truncation_limit)
        return GEMINI_CLASSIFY.render(title=str(record.get("title", "")), excerpt=text), TASK_CLASSIFY
    if spec.backend_id == "llm_qwen_style":
        text = _truncate(_article_text(record), spec.truncation_limit)
        return QWEN_CLASSIFY.render(excerpt=text), TASK_CLASSIFY
    if spec.backend_id == "longformer_style":
        return _truncate(_article_text(record), spec.truncation_limit), TASK_FIVE_CLASS
    # roberta_chunked consumes chunk records, not articles.
    return _truncate(str(record["text"]), spec.truncation_limit), TASK_CHUNK_SCORE


_PARSERS: dict[str, Callable[[dict, str, BackendSpec], dict]] = {
    "llm_gemini_style": _parse_gemini,
    "llm_qwen_style": _parse_qwen,
    "longformer_style": _parse_five_class,
    "roberta_chunked": _parse_chunk_score,
}


def _failed_record(spec: BackendSpec, record: dict, raw: str | None, reason: str) -> dict:
    out = {
        "model_id": spec.effective_model_id,
        "article_id": record.get("id") or record.get("article_id") or "",
        "failed": True,
        "reason": reason,
    }
    if "index" in record:
        out["chunk_index"] = int(record["index"])
    if raw is not None:
        out["raw"] = raw
    return out


def run_backend(
    spec: BackendSpec,
    records: Sequence[dict],
    backend=None,
    workers: int = DEFAULT_WORKERS,
) -> tuple[list[dict], RunStats]:
    """Run every record through the backend; one output record per input."""
    if backend is None:
        backend = backend_for(spec)
    parser = _PARSERS[spec.backend_id]

    def process(record: dict) -> dict:
        raw: str | None = None
        failure = "unknown"
        for _ in range(2):  # one retry for transport and parse failures alike
            try:
                request, task = _request_for(spec, record)
                raw = backend.infer(request, task)
                return parser(record, raw, spec)
            except (BackendError, ParseError, KeyError, TypeError) as exc:
                failure = str(exc) or type(exc).__name__
        logger.warning("record %s failed after retry: %s", record.get("id") or record.get("article_id"), failure)
        return _failed_record(spec, record, raw, failure)

    if workers <= 1 or len(records) <= 1:
        outputs = [process(record) for record in records]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(process, records))
    failed = sum(1 for out in outputs if out.get("failed"))
    return outputs, RunStats(total=len(outputs), failed=failed)


def run_relevance(
    spec: BackendSpec,
    records: Sequence[dict],
    backend=None,
    workers: int = DEFAULT_WORKERS,
) -> tuple[list[dict], RunStats]:
    """Render the relevance prompt per article and record the raw responses.

    Responses are parsed downstream by the analysis toolkit, so records carry
    the raw text only.
    """
    if backend is None:
        backend = backend_for(spec)

    def process(record: dict) -> dict:
        failure = "unknown"
        for _ in range(2):
            try:
                prompt = RELEVANCE.render(excerpt=_truncate(_article_text(record), spec.truncation_limit))
                response = backend.infer(prompt, TASK_RELEVANCE)
                return {"article_id": record["id"], "response": response}
            except (BackendError, KeyError, TypeError) as exc:
                failure = str(exc) or type(exc).__name__
        logger.warning("relevance request for %s failed after retry: %s", record.get("id"), failure)
        return {"article_id": record.get("id", ""), "failed": True, "reason": failure}

    if workers <= 1 or len(records) <= 1:
        outputs = [process(record) for record in records]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(process, records))
    failed = sum(1 for out in outputs if out.get("failed"))
    return outputs, RunStats(total=len(outputs), failed=failed)


def read_jsonl(path) -> list[dict]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            record = json.loads(line)
            if not isinstance(record, dict):
                raise ValueError(f"{path}:{lineno}: expected a JSON object")
            records.append(record)
    return records


def write_jsonl(path, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True))
            fh.write("\n")
