"""Command-line entry point: ``python -m tkrank <command> ...``."""
import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from tkrank.commands import COMMANDS_LIST
from tkrank.config import RunConfig, default_log_level, load_environment_variables
from tkrank.errors import TkRankError

logger = logging.getLogger(__name__)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Seed for every random stream.")
    common.add_argument("--modulus", type=int, default=None, help="Prime modulus p >= 5 (default $TKRANK_MODULUS or 2^31-1).")
    common.add_argument("--lambda", dest="lam", type=float, default=None, help="Amplification factor of the tensor solver.")
    common.add_argument("--k", type=int, default=None, help="Block parameter of T_k.")
    common.add_argument("--threads", type=int, default=None, help="Worker threads for independent trials.")
    common.add_argument("--max-n", type=int, default=None, help="Largest tripartition block size to accept.")
    common.add_argument("--max-entries", type=int, default=None, help="Largest dense tensor or evaluation buffer to build.")
    common.add_argument("--out", default=None, help="Output file; stdout when omitted.")
    common.add_argument("-v", "--verbose", action="count", default=0, help="Debug logging.")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tkrank",
        description="Tensor-rank machinery for T_k and the tripartition / set cover solvers built on it.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = _common_options()
    for command in COMMANDS_LIST:
        sub = subparsers.add_parser(command.name, help=command.description, description=command.description, parents=[common])
        command.configure(sub)
        sub.set_defaults(handler=command)
    return parser


def _configure_logging(verbose: int) -> None:
    level = "DEBUG" if verbose else default_log_level()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def _run_config(args: argparse.Namespace) -> RunConfig:
    overrides = dict(
        seed=args.seed,
        modulus=args.modulus,
        lam=args.lam,
        k=args.k,
        threads=args.threads,
        max_n=args.max_n,
        max_entries=args.max_entries,
        solver=getattr(args, "algo", None),
        input_path=getattr(args, "instance", None) or getattr(args, "path", None),
        output_path=args.out,
    )
    try:
        return RunConfig.from_env(**overrides)
    except (ValidationError, ValueError) as e:
        raise TkRankError(f"invalid configuration: {e}") from e


def main(argv: Optional[List[str]] = None) -> int:
    load_environment_variables()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0) and 2
    _configure_logging(args.verbose)
    try:
        config = _run_config(args)
        return args.handler(args, config)
    except TkRankError as e:
        print(f"❌ {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
