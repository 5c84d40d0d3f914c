"""Shared text utilities and line-oriented record I/O."""

from __future__ import annotations

import json
from typing import Any, Iterable, Iterator


class FramelensError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(FramelensError):
    """A resource or parameter required by an operation is missing or invalid."""


def whitespace_tokens(text: str) -> list[str]:
    """Split on Unicode whitespace; punctuation stays attached to tokens."""
    return text.split()


def strip_edge_punctuation(token: str) -> str:
    """Drop leading and trailing non-alphanumeric characters from a token.

    Internal punctuation (hyphens, apostrophes) is preserved, so
    "crop-raiding," -> "crop-raiding" and "'menace'" -> "menace".
    """
    start, end = 0, len(token)
    while start < end and not token[start].isalnum():
        start += 1
    while end > start and not token[end - 1].isalnum():
        end -= 1
    return token[start:end]


def normalize_token(token: str) -> str:
    return strip_edge_punctuation(token).lower()


def normalize_tokens(text: str) -> list[str]:
    """Lowercased, edge-punctuation-stripped whitespace tokens; empties dropped.

    This is the shared tokenization used for lexicon matching and the
    overlap metrics.
    """
    out = []
    for tok in text.split():
        norm = normalize_token(tok)
        if norm:
            out.append(norm)
    return out


def collapse_whitespace(text: str) -> str:
    """Normalize every whitespace run to a single space and trim the ends."""
    return " ".join(text.split())


def read_jsonl(path: Any) -> Iterator[tuple[int, dict]]:
    """Yield (line_number, record) for every non-blank line of a JSONL file."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FramelensError(f"{path}:{lineno}: invalid JSON record: {exc}") from exc
            if not isinstance(record, dict):
                raise FramelensError(f"{path}:{lineno}: expected a JSON object, got {type(record).__name__}")
            yield lineno, record


def write_jsonl(path: Any, records: Iterable[dict]) -> None:
    """Write records one JSON object per line, keys sorted for determinism."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True))
            fh.write("\n")
