import argparse
import logging
from functools import partial

from tkrank.algebra.field import field_context
from tkrank.algebra.tk import build_group_decomposition, certify_group_decomposition
from tkrank.commands.base import Command, emit, make_rng
from tkrank.config import RunConfig
from tkrank.errors import ParameterError
from tkrank.formats import SetCoverFile, SolveResult, read_instance
from tkrank.solvers.setcover import reduce_and_solve, setcover_from_file
from tkrank.solvers.tripartition import (
    instance_from_file,
    solve_brute,
    solve_tensor,
    solve_wht,
    witness_to_lists,
)

logger = logging.getLogger(__name__)


def configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("instance", help="Instance file (tripartition or set cover JSON).")
    parser.add_argument("--algo", choices=["brute", "wht", "tensor"], default=None, help="Tripartition decider (default wht).")
    parser.add_argument("--sample-set-size", type=int, default=None,
                        help="Tensor solver: draw values from {0..size-1} instead of the whole field.")


def make_tri_solver(config: RunConfig, sample_set_size=None):
    """The configured tripartition decider as a one-argument callable."""
    if config.solver == "brute":
        return solve_brute
    if config.solver == "wht":
        return partial(solve_wht, max_n=config.max_n)
    ctx = field_context(config.modulus)
    decomposition, fallback = build_group_decomposition(config.k, ctx)
    if fallback:
        logger.warning("using the naive decomposition for k=%s", config.k)
    certified = certify_group_decomposition(
        decomposition, config.k, make_rng(config), trials=100, max_entries=config.max_entries
    )
    if not certified:
        raise ParameterError(f"decomposition of T_{config.k} failed certification")
    return partial(
        solve_tensor,
        D=decomposition,
        k=config.k,
        lam=config.lam,
        rng=make_rng(config),
        threads=config.threads,
        sample_set_size=sample_set_size,
        max_entries=config.max_entries,
    )


def run_solve(args: argparse.Namespace, config: RunConfig) -> int:
    doc = read_instance(config.input_path)
    tri_solver = make_tri_solver(config, args.sample_set_size)
    if isinstance(doc, SetCoverFile):
        outcome = reduce_and_solve(setcover_from_file(doc), tri_solver)
        result = SolveResult(answer=outcome.answer, algo=f"reduce+{config.solver}", fallback=outcome.fallback)
    else:
        outcome = tri_solver(instance_from_file(doc))
        p = outcome.probability
        result = SolveResult(
            answer=outcome.answer,
            witness=witness_to_lists(outcome.witness),
            trials_used=outcome.trials_used,
            p=None if p is None else f"{p.numerator}/{p.denominator}",
            count=outcome.count,
            algo=outcome.algo,
        )
    emit(result, config.output_path)
    return 0


solve_command = Command(
    name="solve",
    description="Decide a tripartition instance, or a set-cover instance through the tripartition reduction.",
    configure=configure,
    func=run_solve,
)
