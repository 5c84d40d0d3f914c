"""Command line for running model backends over corpus and chunk files.

Exit status is nonzero when more than 10% of records fail after retries.
Endpoint and workers can also come from FRAMELENS_RUNNER_ENDPOINT and
FRAMELENS_RUNNER_WORKERS; explicit flags win.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .backends import BACKEND_IDS, BackendSpec
from .runner import DEFAULT_WORKERS, read_jsonl, run_backend, run_relevance, write_jsonl

MAX_FAILURE_RATE = 0.10


def _env(name: str, fallback):
    return os.environ.get("FRAMELENS_RUNNER_" + name.upper(), fallback)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="framelens-runner", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="classify articles or score chunks with one backend")
    run.add_argument("--backend", choices=BACKEND_IDS, required=True)
    run.add_argument("--input", required=True, help="article JSONL (chunk JSONL for roberta_chunked)")
    run.add_argument("--output", required=True, help="prediction/score JSONL to write")
    run.add_argument("--endpoint", default=_env("endpoint", "mock:"))
    run.add_argument("--model-id", default="", help="model_id recorded in the output (default: backend id)")
    run.add_argument("--temperature", type=float, default=float(_env("temperature", 0.0)))
    run.add_argument("--max-output-tokens", type=int, default=int(_env("max_output_tokens", 256)))
    run.add_argument("--truncation-limit", type=int, default=int(_env("truncation_limit", 4096)))
    run.add_argument("--workers", type=int, default=int(_env("workers", DEFAULT_WORKERS)))

    relevance = sub.add_parser("relevance", help="run the relevance prompt over articles")
    relevance.add_argument("--input", required=True)
    relevance.add_argument("--output", required=True)
    relevance.add_argument("--endpoint", default=_env("endpoint", "mock:"))
    relevance.add_argument("--truncation-limit", type=int, default=int(_env("truncation_limit", 4096)))
    relevance.add_argument("--workers", type=int, default=int(_env("workers", DEFAULT_WORKERS)))
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        records = read_jsonl(args.input)
        if args.command == "run":
            spec = BackendSpec(
                backend_id=args.backend,
                endpoint=args.endpoint,
                temperature=args.temperature,
                max_output_tokens=args.max_output_tokens,
                truncation_limit=args.truncation_limit,
                model_id=args.model_id,
            )
            outputs, stats = run_backend(spec, records, workers=args.workers)
        else:
            spec = BackendSpec(
                backend_id="llm_gemini_style",
                endpoint=args.endpoint,
                truncation_limit=args.truncation_limit,
            )
            outputs, stats = run_relevance(spec, records, workers=args.workers)
        write_jsonl(args.output, outputs)
    except (ValueError, OSError) as exc:
        print(f"framelens-runner: error: {exc}", file=sys.stderr)
        return 2
    if stats.failure_rate > MAX_FAILURE_RATE:
        print(
            f"framelens-runner: {stats.failed}/{stats.total} records failed "
            f"({stats.failure_rate:.0%} > {MAX_FAILURE_RATE:.0%})",
            file=sys.stderr,
        )
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
