"""Command-line entry point.

Subcommands: prepare, train, evaluate, compare, predict. Global flags
--config/--seed/--out resolve into a RunConfig (file values first, flags
override). Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric
failure.
"""

from __future__ import annotations

import argparse
import sys

from .artifacts import MODEL_KINDS
from .config import RunConfig, load_config
from .errors import DataError, NumericError
from .pipeline import run_compare, run_evaluate, run_predict, run_prepare, run_train


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the CLI contract wants 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spamclf", description="Spam/ham classification pipeline")
    parser.add_argument("--config", help="JSON config file (flags override file values)")
    parser.add_argument("--seed", type=int, help="random seed override")
    parser.add_argument("--out", help="run output directory override")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_prepare = sub.add_parser("prepare", help="clean, filter, and split the dataset")
    p_prepare.add_argument("--dataset", help="CSV path, or 'synthetic' for the bundled generator")

    p_train = sub.add_parser("train", help="train one model on the prepared train split")
    p_train.add_argument("--model", required=True, choices=MODEL_KINDS)

    p_eval = sub.add_parser("evaluate", help="evaluate a saved model on a test set")
    p_eval.add_argument("--artifact", required=True)
    p_eval.add_argument("--test", help="test CSV (default: the prepared test split)")

    p_cmp = sub.add_parser("compare", help="tabulate several models on one test set")
    p_cmp.add_argument("--artifacts", nargs="+", required=True)
    p_cmp.add_argument("--test", help="test CSV (default: the prepared test split)")

    p_pred = sub.add_parser("predict", help="classify a single raw message")
    p_pred.add_argument("--artifact", required=True)
    p_pred.add_argument("--text", required=True)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    config = load_config(args.config) if args.config else RunConfig()
    if args.seed is not None:
        config.seed = args.seed
    if args.out is not None:
        config.out_dir = args.out
    if getattr(args, "dataset", None):
        config.dataset = args.dataset
    return config


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "prepare":
            run_prepare(resolve_config(args))
        elif args.command == "train":
            run_train(resolve_config(args), args.model)
        elif args.command == "evaluate":
            run_evaluate(resolve_config(args), args.artifact, args.test)
        elif args.command == "compare":
            run_compare(resolve_config(args), args.artifacts, args.test)
        elif args.command == "predict":
            run_predict(args.artifact, args.text)
    except DataError as exc:
        print(f"spamclf: data error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"spamclf: numeric failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
