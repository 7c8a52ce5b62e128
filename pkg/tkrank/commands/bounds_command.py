import argparse

from tkrank.analysis import (
    corollary_threshold_table,
    format_runtime_table,
    format_threshold_table,
    runtime_base_table,
    smallest_winning_k,
)
from tkrank.commands.base import Command, emit_json
from tkrank.config import RunConfig


def configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k-max", type=int, default=20, help="Largest k to tabulate.")
    parser.add_argument("--json", action="store_true", help="Emit JSON instead of aligned text.")


def run_bounds(args: argparse.Namespace, config: RunConfig) -> int:
    runtime = runtime_base_table(args.k_max)
    thresholds = corollary_threshold_table(args.k_max)
    winner = smallest_winning_k(runtime)
    if args.json:
        emit_json({
            "runtime_bases": [row.model_dump() for row in runtime],
            "thresholds": [row.model_dump() for row in thresholds],
            "smallest_k_beating_fourier": winner,
        })
        return 0
    print("Runtime bases (conditional on AR(T_k) = C(3k,k))")
    print(format_runtime_table(runtime))
    print()
    print("Rank thresholds")
    print(format_threshold_table(thresholds))
    print()
    print(f"Smallest k beating the 8^n algorithm: {winner if winner else f'none up to {args.k_max}'}")
    return 0


bounds_command = Command(
    name="bounds",
    description="Tabulate runtime bases and rank thresholds for k = 1..k_max.",
    configure=configure,
    func=run_bounds,
)
