import argparse
import sys

from tkrank.algebra.field import field_context
from tkrank.algebra.tk import (
    bounds_report,
    build_group_decomposition,
    build_tk,
    certify_group_decomposition,
    naive_group_decomposition,
    tk_dimension,
)
from tkrank.algebra.tensor import decomposition_from_file, decomposition_to_file, tensor_to_file
from tkrank.commands.base import Command, emit, make_rng
from tkrank.config import RunConfig
from tkrank.errors import ParameterError
from tkrank.formats import DecompositionFile, read_model


def configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("action", choices=["build-tk", "decompose", "verify", "bounds"], help="What to do with T_k.")
    parser.add_argument("path", nargs="?", default=None, help="Decomposition file (verify only).")
    which = parser.add_mutually_exclusive_group()
    which.add_argument("--group", dest="naive", action="store_false", help="2^{3k-1}-term decomposition (default).")
    which.add_argument("--naive", dest="naive", action="store_true", help="2^{3k}-term decomposition over Z_2^{3k}.")
    parser.add_argument("--shifted", action="store_true", help="Use the all-ones shifted group map (valid for odd k only).")
    parser.add_argument("--candidate", type=int, default=None, help="Rank to compare against the thresholds (bounds).")
    parser.set_defaults(naive=False)


def run_tensor(args: argparse.Namespace, config: RunConfig) -> int:
    ctx = field_context(config.modulus)
    k = config.k
    if args.action == "build-tk":
        emit(tensor_to_file(build_tk(k, ctx, config.max_entries)), config.output_path)
    elif args.action == "decompose":
        if args.naive:
            decomposition, fallback = naive_group_decomposition(k, ctx), False
        else:
            decomposition, fallback = build_group_decomposition(k, ctx, shifted=args.shifted)
        if fallback:
            print(f"⚠️ group map fails for k={k}; wrote the naive decomposition instead", file=sys.stderr)
        emit(decomposition_to_file(decomposition), config.output_path)
    elif args.action == "verify":
        if config.input_path is None:
            raise ParameterError("verify needs a decomposition file")
        decomposition = decomposition_from_file(read_model(config.input_path, DecompositionFile))
        side = tk_dimension(k)
        valid = decomposition.dims == (side, side, side) and certify_group_decomposition(
            decomposition, k, make_rng(config), max_entries=config.max_entries
        )
        if valid:
            print(f"✅ valid, rank {decomposition.rank}")
        else:
            print(f"❌ invalid decomposition of T_{k} ({decomposition.rank} terms)")
    else:
        report = bounds_report(k, args.candidate)
        emit(report, config.output_path)
    return 0


tensor_command = Command(
    name="tensor",
    description="Build T_k, write its character decompositions, verify a decomposition file, or report rank bounds.",
    configure=configure,
    func=run_tensor,
)
