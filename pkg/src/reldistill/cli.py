"""Command-line entry point: staged subcommands over a JSON run config.

Exit codes: 0 success, 1 validation error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .corpus import CorpusFormatError
from .kb import SchemaError
from .pipeline import STAGES, StageError, Workspace, load_run_config, run_all


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reldistill",
        description=(
            "Distantly supervised relation extraction with label-propagation "
            "distillation of training examples"
        ),
    )
    parser.add_argument("--config", required=True, help="path to the JSON run config")
    parser.add_argument("--out", required=True, help="output directory for artifacts")
    parser.add_argument("--seed", type=int, default=None, help="override training rng seed")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("ingest", "mentions", "propagate", "train", "extract", "eval", "sweep"):
        sub.add_parser(name, help=f"run the {name} stage")
    sub.add_parser("run", help="run the full pipeline (ingest through eval)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_run_config(args.config)
        if args.seed is not None:
            config.training = dataclasses.replace(config.training, rng_seed=args.seed)
        ws = Workspace(args.out, config)
        if args.command == "run":
            run_all(ws)
        else:
            STAGES[args.command](ws)
    except (StageError, CorpusFormatError, SchemaError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
