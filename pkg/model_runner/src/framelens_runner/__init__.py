"""framelens-model-runner: executes sentiment model backends over article and
chunk files, emitting records in the framelens prediction/score formats.

All model access goes through a mockable text-in/text-out backend interface,
so the suite runs offline; real endpoints are plain HTTP.
"""

from .backends import (
    BACKEND_IDS,
    BackendError,
    BackendSpec,
    HttpBackend,
    MockBackend,
    backend_for,
)
from .prompts import GEMINI_CLASSIFY, QWEN_CLASSIFY, RELEVANCE, PromptTemplate, render_relevance_prompt
from .runner import RunStats, run_backend, run_relevance

__version__ = "0.1.0"

__all__ = [
    "BACKEND_IDS",
    "BackendError",
    "BackendSpec",
    "GEMINI_CLASSIFY",
    "HttpBackend",
    "MockBackend",
    "PromptTemplate",
    "QWEN_CLASSIFY",
    "RELEVANCE",
    "RunStats",
    "backend_for",
    "render_relevance_prompt",
    "run_backend",
    "run_relevance",
]
