import argparse

from tkrank.commands.base import Command, emit, make_rng
from tkrank.config import RunConfig
from tkrank.errors import GuardExceeded
from tkrank.generators import random_setcover, random_tripartition
from tkrank.solvers.setcover import setcover_to_file
from tkrank.solvers.tripartition import instance_to_file


def configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("kind", choices=["tripartition", "setcover"], help="Instance family to generate.")
    parser.add_argument("--n", type=int, required=True, help="Block size (tripartition) or universe size (set cover).")
    parser.add_argument("--density", type=float, default=0.3, help="Membership probability per n-subset (tripartition).")
    parser.add_argument("--t", type=int, default=None, help="Set-cover budget.")
    parser.add_argument("--s", type=int, default=None, help="Largest set size (set cover).")
    parser.add_argument("--sets", type=int, default=None, help="Number of random sets (set cover); default 2n.")
    parser.add_argument("--plant", action="store_true", help="Insert a solution so the instance is a yes-instance.")


def run_gen(args: argparse.Namespace, config: RunConfig) -> int:
    rng = make_rng(config)
    if args.kind == "tripartition":
        if args.n > config.max_n:
            raise GuardExceeded(f"n={args.n} exceeds max_n={config.max_n}")
        inst = random_tripartition(args.n, args.density, rng, plant=args.plant)
        emit(instance_to_file(inst), config.output_path)
    else:
        t = args.t if args.t is not None else args.n
        s = args.s if args.s is not None else 3
        inst = random_setcover(args.n, t, s, rng, count=args.sets, plant=args.plant)
        emit(setcover_to_file(inst), config.output_path)
    return 0


gen_command = Command(
    name="gen",
    description="Generate a seeded random tripartition or set-cover instance, optionally with a planted solution.",
    configure=configure,
    func=run_gen,
)
