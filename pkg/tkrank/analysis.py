"""Runtime bases and rank thresholds, exact first and floating alongside.

The conditional column assumes AR(T_k) = C(3k, k); the unconditional one
uses the proven rank 2^{3k-1} of the character decomposition.
"""
import math
from fractions import Fraction
from typing import List

from pydantic import BaseModel, Field

from tkrank.algebra.combinatorics import binomial
from tkrank.algebra.tk import BoundsReport, bounds_report
from tkrank.errors import ParameterError
from tkrank.formats import RationalValue

MAX_TABLE_K = 200

# base per tripartition block n of the 8^n Fourier algorithm
FOURIER_BASE = 8


class RuntimeBaseRow(BaseModel):
    k: int = Field(description="Block parameter of T_k.")
    base_per_block: RationalValue = Field(description="C(3k,k) * 27^k / (C(3k,k) C(2k,k)); runtime base per k elements of n.")
    base_per_n: float = Field(description="base_per_block^(1/k): runtime base per unit of the block size n.")
    base_per_element: float = Field(description="base_per_block^(1/(3k)): runtime base per universe element.")
    beats_fourier: bool = Field(description="True when base_per_n < 8, decided in exact integer arithmetic.")
    unconditional_base_per_block: RationalValue = Field(description="Same base with the proven rank 2^{3k-1}.")
    unconditional_base_per_n: float = Field(description="unconditional_base_per_block^(1/k).")
    unconditional_beats_fourier: bool = Field(description="True when the unconditional base per n is below 8.")


class ThresholdRow(BaseModel):
    report: BoundsReport = Field(description="Rank thresholds of T_k.")
    threshold_over_8k: RationalValue = Field(description="C(3k,k) C(2k,k) / 27^k, the threshold relative to 8^k.")


def _root(q: Fraction, degree: int) -> float:
    # logs of the exact parts keep huge numerators out of float range
    return math.exp((math.log(q.numerator) - math.log(q.denominator)) / degree)


def base_per_block(k: int, rank: int) -> Fraction:
    return Fraction(rank * 27**k, binomial(3 * k, k) * binomial(2 * k, k))


def _beats_fourier(q: Fraction, k: int) -> bool:
    # q^(1/k) < 8  <=>  q < 8^k
    return q < FOURIER_BASE**k


def runtime_base_table(k_max: int) -> List[RuntimeBaseRow]:
    if not 1 <= k_max <= MAX_TABLE_K:
        raise ParameterError(f"k_max must be in [1, {MAX_TABLE_K}], got {k_max}")
    rows = []
    for k in range(1, k_max + 1):
        conditional = base_per_block(k, binomial(3 * k, k))
        unconditional = base_per_block(k, 2 ** (3 * k - 1))
        rows.append(
            RuntimeBaseRow(
                k=k,
                base_per_block=RationalValue.of(conditional),
                base_per_n=_root(conditional, k),
                base_per_element=_root(conditional, 3 * k),
                beats_fourier=_beats_fourier(conditional, k),
                unconditional_base_per_block=RationalValue.of(unconditional),
                unconditional_base_per_n=_root(unconditional, k),
                unconditional_beats_fourier=_beats_fourier(unconditional, k),
            )
        )
    return rows


def smallest_winning_k(rows: List[RuntimeBaseRow]) -> int:
    for row in rows:
        if row.beats_fourier:
            return row.k
    return 0


def corollary_threshold_table(k_max: int) -> List[ThresholdRow]:
    if not 1 <= k_max <= MAX_TABLE_K:
        raise ParameterError(f"k_max must be in [1, {MAX_TABLE_K}], got {k_max}")
    return [
        ThresholdRow(
            report=bounds_report(k),
            threshold_over_8k=RationalValue.of(Fraction(binomial(3 * k, k) * binomial(2 * k, k), 27**k)),
        )
        for k in range(1, k_max + 1)
    ]


def format_runtime_table(rows: List[RuntimeBaseRow]) -> str:
    header = f"{'k':>4}  {'base/block':>14}  {'base/n':>9}  {'base/elem':>9}  {'<8':>3}  {'uncond/n':>9}"
    lines = [header, "-" * len(header)]
    for row in rows:
        lines.append(
            f"{row.k:>4}  {row.base_per_block.value:>14.6g}  {row.base_per_n:>9.4f}  "
            f"{row.base_per_element:>9.4f}  {'yes' if row.beats_fourier else 'no':>3}  "
            f"{row.unconditional_base_per_n:>9.4f}"
        )
    return "\n".join(lines)


def format_threshold_table(rows: List[ThresholdRow]) -> str:
    header = f"{'k':>4}  {'threshold':>14}  {'(2/9)8^k/k':>14}  {'upper 8^k/2':>14}  {'ratio to 8^k':>12}"
    lines = [header, "-" * len(header)]
    for row in rows:
        r = row.report
        lines.append(
            f"{r.k:>4}  {r.threshold.value:>14.6g}  {r.simple_threshold.value:>14.6g}  "
            f"{r.upper_bound.value:>14.6g}  {row.threshold_over_8k.value:>12.6g}"
        )
    return "\n".join(lines)
