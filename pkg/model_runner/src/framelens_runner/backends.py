"""Backend specifications and transports.

Every backend is reached through a single text-in/text-out call tagged with
the task kind, so real endpoints and the deterministic offline mock are
interchangeable. Nothing here imports model weights; remote backends are
plain HTTP, and the mock keeps the whole test suite offline.
"""

from __future__ import annotations

import hashlib
import json
import re
import urllib.request
from dataclasses import dataclass

BACKEND_IDS = ("llm_gemini_style", "llm_qwen_style", "longformer_style", "roberta_chunked")

TASK_CLASSIFY = "classify"
TASK_RELEVANCE = "relevance"
TASK_FIVE_CLASS = "five_class"
TASK_CHUNK_SCORE = "chunk_score"

FIVE_CLASS_LABELS = ("very negative", "negative", "neutral", "positive", "very positive")

_NEGATIVE_HINTS = (
    "killed", "killing", "attack", "attacked", "menace", "rampage", "rampaging",
    "panic", "terror", "destroyed", "damage", "damaged", "charged", "trampled",
    "conflict", "fear", "havoc", "casualties", "tusker",
)
_POSITIVE_HINTS = ("rescued", "rescue", "saved", "conservation", "celebrated", "thriving", "protected")


class BackendError(RuntimeError):
    pass


@dataclass(frozen=True)
class BackendSpec:
    backend_id: str
    endpoint: str = "mock:"
    temperature: float = 0.0
    max_output_tokens: int = 256
    truncation_limit: int = 4096
    model_id: str = ""

    def __post_init__(self):
        if self.backend_id not in BACKEND_IDS:
            raise ValueError(f"unknown backend_id {self.backend_id!r}; expected one of {BACKEND_IDS}")
        if not 0.0 <= self.temperature <= 1.0:
            raise ValueError(f"temperature must be in [0, 1], got {self.temperature}")
        if self.truncation_limit <= 0:
            raise ValueError(f"truncation_limit must be positive, got {self.truncation_limit}")
        if self.max_output_tokens <= 0:
            raise ValueError(f"max_output_tokens must be positive, got {self.max_output_tokens}")

    @property
    def effective_model_id(self) -> str:
        return self.model_id or self.backend_id


def _hint_counts(text: str) -> tuple[int, int]:
    lowered = text.lower()
    negative = sum(lowered.count(hint) for hint in _NEGATIVE_HINTS)
    positive = sum(lowered.count(hint) for hint in _POSITIVE_HINTS)
    return negative, positive


def _leading_sentences(text: str, count: int = 2) -> list[str]:
    # Crude split that is still verbatim: slices end exactly at the period.
    pieces = []
    start = 0
    for match in re.finditer(r"\.(?=\s|$)", text):
        pieces.append(text[start : match.end()].strip())
        start = match.end()
        if len(pieces) >= count:
            break
    if not pieces and text.strip():
        pieces.append(text.strip())
    return pieces[:count]


class MockBackend:
    """Deterministic offline backend.

    Modes: "ok" answers every request; "malformed" returns non-JSON text for
    classification tasks; "fail" raises on every call; "flaky" fails the
    first attempt for each distinct request and succeeds on the retry.
    """

    def __init__(self, mode: str = "ok"):
        if mode not in ("ok", "malformed", "fail", "flaky"):
            raise ValueError(f"unknown mock mode {mode!r}")
        self.mode = mode
        self._seen: set[str] = set()

    def _maybe_fail(self, request: str) -> None:
        if self.mode == "fail":
            raise BackendError("mock backend configured to fail")
        if self.mode == "flaky":
            digest = hashlib.sha256(request.encode("utf-8")).hexdigest()
            if digest not in self._seen:
                self._seen.add(digest)
                raise BackendError("mock backend transient failure")

    @staticmethod
    def _excerpt_from_prompt(request: str) -> str:
        for pattern in (r"Article Text: (.*?)\nTask:", r"Article:\n(.*)\Z", r"Article:\n(.*?)\nOutput required"):
            match = re.search(pattern, request, flags=re.DOTALL)
            if match:
                return match.group(1)
        return request

    def infer(self, request: str, task: str) -> str:
        self._maybe_fail(request)
        if self.mode == "malformed" and task in (TASK_CLASSIFY, TASK_RELEVANCE):
            return "not json"
        if task == TASK_CLASSIFY:
            excerpt = self._excerpt_from_prompt(request)
            negative, positive = _hint_counts(excerpt)
            if negative > positive:
                label = "negative"
            elif positive > negative:
                label = "positive"
            else:
                label = "neutral"
            if "supporting_sentences" in request:
                return json.dumps(
                    {"sentiment": label, "supporting_sentences": _leading_sentences(excerpt)},
                    ensure_ascii=False,
                )
            return json.dumps(
                {
                    "classification": label.capitalize(),
                    "confidence": round(min(0.99, 0.5 + 0.1 * (negative + positive)), 2),
                    "reasoning": "Deterministic keyword rule over the article text.",
                },
                ensure_ascii=False,
            )
        if task == TASK_RELEVANCE:
            excerpt = self._excerpt_from_prompt(request)
            negative, _ = _hint_counts(excerpt)
            if negative > 0:
                return "Relevance: Relevant\nLocation: Hassan; Karnataka"
            return "Relevance: Not Relevant\nLocation: Location not specified"
        if task == TASK_FIVE_CLASS:
            negative, positive = _hint_counts(request)
            if negative >= 3:
                return "very negative"
            if negative > positive:
                return "negative"
            if positive > negative:
                return "very positive" if positive >= 3 else "positive"
            return "neutral"
        if task == TASK_CHUNK_SCORE:
            negative, _ = _hint_counts(request)
            return f"{negative / (negative + 1):.6f}"
        raise BackendError(f"unknown task {task!r}")


class HttpBackend:
    """POSTs the request text to an endpoint and returns the response body.

    The task kind travels in the X-Framelens-Task header so one endpoint can
    serve every backend style.
    """

    def __init__(self, endpoint: str, timeout: float = 30.0):
        if not endpoint.startswith(("http://", "https://")):
            raise ValueError(f"HTTP backend requires an http(s) endpoint, got {endpoint!r}")
        self.endpoint = endpoint
        self.timeout = timeout

    def infer(self, request: str, task: str) -> str:
        http_request = urllib.request.Request(
            self.endpoint,
            data=request.encode("utf-8"),
            headers={"Content-Type": "text/plain; charset=utf-8", "X-Framelens-Task": task},
            method="POST",
        )
        try:
            with urllib.request.urlopen(http_request, timeout=self.timeout) as response:
                return response.read().decode("utf-8")
        except OSError as exc:
            raise BackendError(f"endpoint {self.endpoint} failed: {exc}") from exc


def backend_for(spec: BackendSpec):
    endpoint = spec.endpoint
    if endpoint.startswith("mock"):
        _, _, mode = endpoint.partition(":")
        return MockBackend(mode or "ok")
    if endpoint.startswith(("http://", "https://")):
        return HttpBackend(endpoint)
    raise ValueError(f"unsupported endpoint {endpoint!r} (use mock:[mode] or http(s)://...)")
