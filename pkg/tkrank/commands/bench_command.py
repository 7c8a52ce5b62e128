import argparse
import logging
import os
import time
from datetime import datetime
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field

from tkrank.commands.base import Command, make_rng
from tkrank.commands.solve_command import make_tri_solver
from tkrank.config import RunConfig, default_output_dir
from tkrank.errors import GuardExceeded, ParameterError
from tkrank.formats import write_model
from tkrank.generators import random_tripartition

logger = logging.getLogger(__name__)


class BenchRow(BaseModel):
    solver: str = Field(description="Tripartition decider timed.")
    n: int = Field(description="Block size of the instance.")
    family_sizes: List[int] = Field(description="|F1|, |F2|, |F3|.")
    answer: bool = Field(description="Answer returned (identical across repetitions).")
    median_seconds: float = Field(description="Median wall-clock time over the repetitions.")
    ratio_to_previous: Optional[float] = Field(default=None, description="Median time relative to the previous size.")


class BenchReport(BaseModel):
    timestamp: str = Field(description="When the benchmark ran (ISO 8601).")
    seed: Optional[int] = Field(description="Seed of the instance generator.")
    repetitions: int = Field(description="Timed runs per size.")
    rows: List[BenchRow] = Field(description="One row per (solver, n).")


def configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--suite", choices=["wht", "brute", "tensor"], default="wht", help="Decider to time.")
    parser.add_argument("--sizes", default="4,5,6", help="Comma-separated block sizes n.")
    parser.add_argument("--repetitions", type=int, default=3, help="Timed runs per size.")
    parser.add_argument("--density", type=float, default=0.05, help="Family density of the planted instances.")


def _parse_sizes(raw: str) -> List[int]:
    try:
        sizes = [int(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise ParameterError(f"--sizes must be comma-separated integers, got {raw!r}")
    if not sizes or any(n < 1 for n in sizes):
        raise ParameterError("--sizes needs at least one positive block size")
    return sizes


def run_bench(args: argparse.Namespace, config: RunConfig) -> int:
    sizes = _parse_sizes(args.sizes)
    if args.repetitions < 1:
        raise ParameterError("--repetitions must be at least 1")
    if max(sizes) > config.max_n:
        raise GuardExceeded(f"size {max(sizes)} exceeds max_n={config.max_n}")
    config = config.model_copy(update={"solver": args.suite})
    rng = make_rng(config)
    rows: List[BenchRow] = []
    previous = None
    for n in sizes:
        inst = random_tripartition(n, args.density, rng, plant=True)
        solver = make_tri_solver(config)
        timings = []
        answer = None
        for _ in range(args.repetitions):
            start = time.perf_counter()
            answer = bool(solver(inst))
            timings.append(time.perf_counter() - start)
        median = float(np.median(timings))
        rows.append(BenchRow(
            solver=args.suite,
            n=n,
            family_sizes=[len(f) for f in inst.families],
            answer=answer,
            median_seconds=median,
            ratio_to_previous=None if previous is None or previous == 0 else median / previous,
        ))
        logger.info("bench %s n=%s median=%.4fs", args.suite, n, median)
        previous = median

    timestamp = datetime.now()
    report = BenchReport(timestamp=timestamp.isoformat(), seed=config.seed, repetitions=args.repetitions, rows=rows)
    path = config.output_path or os.path.join(default_output_dir(), f"bench_{timestamp.strftime('%Y%m%d_%H%M%S')}.json")
    write_model(report, path)

    print(f"{'solver':>7}  {'n':>3}  {'|F1|,|F2|,|F3|':>18}  {'answer':>6}  {'median s':>10}  {'ratio':>6}")
    for row in rows:
        ratio = "" if row.ratio_to_previous is None else f"{row.ratio_to_previous:.2f}"
        sizes_text = ",".join(map(str, row.family_sizes))
        print(f"{row.solver:>7}  {row.n:>3}  {sizes_text:>18}  {str(row.answer):>6}  {row.median_seconds:>10.4f}  {ratio:>6}")
    print(f"📁 Saved to: {path}")
    return 0


bench_command = Command(
    name="bench",
    description="Time a tripartition decider on planted instances of growing block size.",
    configure=configure,
    func=run_bench,
)
