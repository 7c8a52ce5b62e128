import argparse
import logging
import math
from fractions import Fraction
from dataclasses import dataclass
from typing import Callable, List, Tuple

from pydantic import BaseModel, Field

from tkrank.algebra.combinatorics import binomial, random_permutation
from tkrank.algebra.field import field_context
from tkrank.algebra.tensor import flattening_rank, verify_decomposition
from tkrank.algebra.tk import (
    bounds_report,
    build_tk,
    group_decomposition,
    tk_dimension,
    tk_support_size,
    verify_tightness,
)
from tkrank.analysis import runtime_base_table, smallest_winning_k
from tkrank.commands.base import Command, make_rng
from tkrank.config import RunConfig
from tkrank.formats import write_model
from tkrank.generators import planted_tripartition, random_setcover, random_tripartition
from tkrank.solvers.setcover import reduce_and_solve, solve_brute_setcover
from tkrank.solvers.tripartition import (
    count_brute,
    count_wht,
    solve_brute,
    solve_tensor,
    solve_wht,
    success_probability,
    witness_survives,
)

logger = logging.getLogger(__name__)


class CheckResult(BaseModel):
    name: str = Field(description="What was checked.")
    passed: bool = Field(description="Whether the check held.")
    detail: str = Field(default="", description="Counts or the first disagreement.")


class SelftestReport(BaseModel):
    full: bool = Field(description="Whether the full-size corpus ran.")
    seed: int = Field(description="Seed of every random corpus.")
    checks: List[CheckResult] = Field(description="One entry per check, in run order.")

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


@dataclass(frozen=True)
class CorpusSize:
    max_k: int
    tripartitions: int
    tensor_instances: int
    setcovers: int
    max_setcover_n: int
    draws: int
    tolerance: float


QUICK = CorpusSize(max_k=2, tripartitions=60, tensor_instances=40, setcovers=25, max_setcover_n=9, draws=2000, tolerance=0.04)
FULL = CorpusSize(max_k=3, tripartitions=500, tensor_instances=500, setcovers=200, max_setcover_n=12, draws=10_000, tolerance=0.02)

DEFAULT_SEED = 20240101


def configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--full", action="store_true", help="Run the full-size oracle corpus (minutes).")


def check_decompositions(size: CorpusSize, config: RunConfig) -> Tuple[bool, str]:
    ctx = field_context(config.modulus)
    ranks = []
    for k in range(1, size.max_k + 1):
        D = group_decomposition(k, ctx)
        if D.rank != 2 ** (3 * k - 1) or not verify_decomposition(D, build_tk(k, ctx), config.max_entries):
            return False, f"k={k}: rank {D.rank}"
        ranks.append(str(D.rank))
    return True, "ranks " + ", ".join(ranks)


def check_structure(size: CorpusSize, config: RunConfig) -> Tuple[bool, str]:
    ctx = field_context(config.modulus)
    for k in range(1, size.max_k + 1):
        if not verify_tightness(k):
            return False, f"k={k}: not tight"
        T = build_tk(k, ctx, config.max_entries)
        for leg in (1, 2, 3):
            if flattening_rank(T, leg, config.max_entries) != tk_dimension(k):
                return False, f"k={k}: flattening {leg} is degenerate"
    return True, f"k <= {size.max_k}"


def check_support_sizes(size: CorpusSize, config: RunConfig) -> Tuple[bool, str]:
    sizes = []
    for k in range(1, size.max_k + 2):
        actual = len(build_tk(k, field_context(config.modulus), config.max_entries))
        if actual != tk_support_size(k):
            return False, f"k={k}: {actual} != {tk_support_size(k)}"
        sizes.append(str(actual))
    return True, ", ".join(sizes)


def check_tripartition_oracles(size: CorpusSize, config: RunConfig) -> Tuple[bool, str]:
    rng = make_rng(config)
    for i in range(size.tripartitions):
        n = int(rng.integers(1, 5))
        inst = random_tripartition(n, float(rng.uniform(0.05, 0.4)), rng, plant=bool(rng.integers(0, 2)))
        brute, wht = solve_brute(inst), solve_wht(inst)
        if brute.answer != wht.answer or count_brute(inst) != count_wht(inst):
            return False, f"instance {i} (n={n}): brute={brute.answer} wht={wht.answer}"
    return True, f"{size.tripartitions} instances"


def check_tensor_solver(size: CorpusSize, config: RunConfig) -> Tuple[bool, str]:
    rng = make_rng(config)
    ctx = field_context(config.modulus)
    decompositions = {k: group_decomposition(k, ctx) for k in (1, 2)}
    yes = detected = false_positives = 0
    for _ in range(size.tensor_instances):
        n = int(rng.integers(1, 5))
        k = int(rng.integers(1, 3))
        inst = random_tripartition(n, float(rng.uniform(0.02, 0.2)), rng, plant=bool(rng.integers(0, 2)))
        truth = solve_brute(inst).answer
        answer = solve_tensor(inst, decompositions[k], k, lam=5.0, rng=rng).answer
        if truth:
            yes += 1
            detected += answer
        elif answer:
            false_positives += 1
    rate = detected / yes if yes else 1.0
    return false_positives == 0 and rate >= 0.95, f"{false_positives} false positives, detected {detected}/{yes}"


def check_setcover_oracle(size: CorpusSize, config: RunConfig) -> Tuple[bool, str]:
    rng = make_rng(config)
    for i in range(size.setcovers):
        n = int(rng.integers(1, size.max_setcover_n + 1))
        s = int(rng.integers(1, 4))
        t = int(rng.integers(1, 6))
        plant = bool(rng.integers(0, 2)) and math.ceil(n / s) <= t
        inst = random_setcover(n, t, s, rng, count=int(rng.integers(1, 2 * n + 1)), plant=plant)
        expected = solve_brute_setcover(inst)
        if reduce_and_solve(inst, solve_wht).answer != expected:
            return False, f"instance {i} (n={n}, t={t}, s={s}): expected {expected}"
    return True, f"{size.setcovers} instances"


def check_survival_rate(size: CorpusSize, config: RunConfig) -> Tuple[bool, str]:
    rng = make_rng(config)
    witness = planted_tripartition(2, rng)
    hits = sum(witness_survives(witness, random_permutation(6, rng), 1, 2) for _ in range(size.draws))
    rate = hits / size.draws
    expected = float(success_probability(2, 1))
    return abs(rate - expected) <= size.tolerance, f"{rate:.4f} vs {expected:.4f}"


def check_constants(size: CorpusSize, config: RunConfig) -> Tuple[bool, str]:
    rows = runtime_base_table(50)
    report = bounds_report(1)
    checks = [
        smallest_winning_k(rows) == 11,
        binomial(33, 11) > 10**8,
        abs(rows[49].base_per_element - 3 / 2 ** (2 / 3)) < 0.05,
        report.threshold.fraction() == report.simple_threshold.fraction() == Fraction(16, 9),
    ]
    return all(checks), f"smallest k = {smallest_winning_k(rows)}, base/element(50) = {rows[49].base_per_element:.4f}"


CHECKS: List[Tuple[str, Callable[[CorpusSize, RunConfig], Tuple[bool, str]]]] = [
    ("decomposition certificates", check_decompositions),
    ("tightness and flattening ranks", check_structure),
    ("support sizes", check_support_sizes),
    ("brute vs Fourier tripartition", check_tripartition_oracles),
    ("tensor solver one-sidedness", check_tensor_solver),
    ("set cover reduction vs brute force", check_setcover_oracle),
    ("witness survival rate", check_survival_rate),
    ("runtime and threshold constants", check_constants),
]


def run_selftest(args: argparse.Namespace, config: RunConfig) -> int:
    size = FULL if args.full else QUICK
    if config.seed is None:
        config = config.model_copy(update={"seed": DEFAULT_SEED})
    results = []
    for name, check in CHECKS:
        logger.info("selftest: %s", name)
        passed, detail = check(size, config)
        results.append(CheckResult(name=name, passed=passed, detail=detail))
        print(f"{'✅' if passed else '❌'} {name}: {detail}")
    report = SelftestReport(full=args.full, seed=config.seed, checks=results)
    if config.output_path:
        write_model(report, config.output_path)
        print(f"📁 Saved to: {config.output_path}")
    return 0 if report.passed else 1


selftest_command = Command(
    name="selftest",
    description="Run the oracle-agreement corpus, the certificates and the constant checks.",
    configure=configure,
    func=run_selftest,
)
