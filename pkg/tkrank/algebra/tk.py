"""The tensors T_k, their structural certificates and their character
decompositions.

T_k has one axis per k-subset of [3k] (colex order) and coefficient 1 at
(S, T, U) exactly when S, T, U partition [3k].
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from tkrank.algebra.combinatorics import SubsetMask, binomial, enumerate_balanced, ksubset_bits, rank_bits
from tkrank.algebra.field import FieldContext, field_context
from tkrank.algebra.tensor import (
    DEFAULT_MAX_ENTRIES,
    Decomposition,
    SparseTensor,
    certify_decomposition_randomized,
    verify_decomposition,
)
from tkrank.errors import GuardExceeded, ParameterError
from tkrank.formats import RationalValue

logger = logging.getLogger(__name__)

MAX_BUILD_K = 4
MAX_EXACT_K = 3


def _check_k(k: int, limit: int) -> None:
    if k < 1:
        raise ParameterError(f"k must be at least 1, got {k}")
    if k > limit:
        raise GuardExceeded(f"k={k} exceeds the desk-scale limit {limit}")


def tk_dimension(k: int) -> int:
    return binomial(3 * k, k)


def tk_support_size(k: int) -> int:
    return binomial(3 * k, k) * binomial(2 * k, k)


def build_tk(k: int, ctx: Optional[FieldContext] = None, max_entries: int = DEFAULT_MAX_ENTRIES) -> SparseTensor:
    _check_k(k, MAX_BUILD_K)
    if tk_support_size(k) > max_entries:
        raise GuardExceeded(f"T_{k} has {tk_support_size(k)} entries, above the guard of {max_entries}")
    ctx = ctx or field_context()
    m = 3 * k
    full = (1 << m) - 1
    subsets = ksubset_bits(m, k)
    entries = {}
    for s in subsets:
        for t in subsets:
            if s & t:
                continue
            u = full ^ s ^ t
            entries[(rank_bits(s), rank_bits(t), rank_bits(u))] = 1
    n = len(subsets)
    return SparseTensor((n, n, n), entries, ctx)


def _support_cube(k: int, first: int) -> np.ndarray:
    """Disjointness of (S_first, T, U) for all T, U, as an N x N boolean slab."""
    m = 3 * k
    masks = np.array(ksubset_bits(m, k), dtype=np.int64)
    full = (1 << m) - 1
    return (masks[first] | masks[:, None] | masks[None, :]) == full


@dataclass(frozen=True)
class TightnessWitness:
    """f(S) = sum_{i in S} 4^i, indexed by colex rank; target = sum_{i=1}^{3k} 4^i."""
    k: int
    labels: Tuple[int, ...]
    target: int

    def labelings(self) -> Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]:
        """(f, g, h) with f(i) + g(j) + h(k) = 0 exactly on the support."""
        shifted = tuple(label - self.target for label in self.labels)
        return self.labels, self.labels, shifted


def tightness_witness(k: int) -> TightnessWitness:
    _check_k(k, MAX_BUILD_K)
    m = 3 * k
    labels = tuple(sum(4**e for e in SubsetMask(bits, m).elements()) for bits in ksubset_bits(m, k))
    return TightnessWitness(k, labels, sum(4**i for i in range(1, m + 1)))


def verify_tightness(k: int) -> bool:
    witness = tightness_witness(k)
    if len(set(witness.labels)) != len(witness.labels):
        return False
    f = np.array(witness.labels, dtype=np.int64)
    for first in range(len(f)):
        sums = (f[first] + f[:, None] + f[None, :]) == witness.target
        if not np.array_equal(sums, _support_cube(k, first)):
            logger.info("tightness fails for k=%s at first index %s", k, first)
            return False
    return True


@dataclass(frozen=True)
class GroupLabel:
    """Element of Z_2^{3k-1}; element e in {2..3k} sits at bit position e - 2."""
    bits: int
    k: int

    @property
    def width(self) -> int:
        return 3 * self.k - 1

    def __str__(self) -> str:
        return "".join("1" if self.bits >> i & 1 else "0" for i in range(self.width))


def _group_label_bits(bits: int, k: int, shifted: bool) -> int:
    width = 3 * k - 1
    rest = bits >> 1
    if bits & 1 or not shifted:
        return rest
    return ((1 << width) - 1) ^ rest


def group_map_f(S: SubsetMask, k: int, shifted: bool = False) -> GroupLabel:
    """Label S by the indicator of S minus {1} on coordinates 2..3k.

    With ``shifted`` the all-ones vector is added whenever 1 is not in S;
    that variant only satisfies the disjointness criterion for odd k.
    """
    if S.m != 3 * k:
        raise ParameterError(f"subset over [{S.m}] is not a subset of [{3 * k}]")
    if len(S) != k:
        raise ParameterError(f"subset {S} has {len(S)} elements, expected {k}")
    return GroupLabel(_group_label_bits(S.bits, k, shifted), k)


def verify_group_map(k: int, shifted: bool = False) -> bool:
    """f(S) + f(T) + f(U) = all-ones exactly when S, T, U are disjoint."""
    _check_k(k, MAX_BUILD_K)
    labels = np.array([_group_label_bits(b, k, shifted) for b in ksubset_bits(3 * k, k)], dtype=np.int64)
    x = (1 << (3 * k - 1)) - 1
    for first in range(len(labels)):
        hits = (labels[first] ^ labels[:, None] ^ labels[None, :]) == x
        if not np.array_equal(hits, _support_cube(k, first)):
            return False
    return True


def _parity(values: np.ndarray, width: int) -> np.ndarray:
    acc = np.zeros_like(values)
    for b in range(width):
        acc ^= (values >> b) & 1
    return acc


def _character_decomposition(labels: np.ndarray, width: int, ctx: FieldContext) -> Decomposition:
    """One term per character chi of Z_2^width, target x = all-ones."""
    order = 1 << width
    chars = np.arange(order, dtype=np.int64)
    x = order - 1
    parities = _parity(chars[:, None] & labels[None, :], width)
    factor = np.where(parities == 1, ctx.minus_one, 1)
    inv_order = ctx.inv(order % ctx.p)
    scales = [ctx.mul(ctx.sign(int(par)), inv_order) for par in _parity(chars & x, width)]
    n = labels.shape[0]
    return Decomposition((n, n, n), factor, factor, factor, scales, ctx)


def naive_group_decomposition(k: int, ctx: Optional[FieldContext] = None) -> Decomposition:
    """2^{3k} terms over G = Z_2^{3k} with f the full indicator vector."""
    _check_k(k, MAX_BUILD_K)
    ctx = ctx or field_context()
    labels = np.array(ksubset_bits(3 * k, k), dtype=np.int64)
    return _character_decomposition(labels, 3 * k, ctx)


def build_group_decomposition(
    k: int, ctx: Optional[FieldContext] = None, shifted: bool = False
) -> Tuple[Decomposition, bool]:
    """The 2^{3k-1}-term decomposition and whether it fell back to the naive one."""
    _check_k(k, MAX_BUILD_K)
    ctx = ctx or field_context()
    if k <= MAX_EXACT_K and not verify_group_map(k, shifted):
        logger.warning("group map fails for k=%s (shifted=%s); using the naive decomposition", k, shifted)
        return naive_group_decomposition(k, ctx), True
    labels = np.array([_group_label_bits(b, k, shifted) for b in ksubset_bits(3 * k, k)], dtype=np.int64)
    return _character_decomposition(labels, 3 * k - 1, ctx), False


def group_decomposition(k: int, ctx: Optional[FieldContext] = None, shifted: bool = False) -> Decomposition:
    return build_group_decomposition(k, ctx, shifted)[0]


def certify_group_decomposition(
    D: Decomposition,
    k: int,
    rng: Optional[np.random.Generator] = None,
    trials: int = 1000,
    max_entries: int = DEFAULT_MAX_ENTRIES,
) -> bool:
    """Exact for k <= 3, randomized point agreement above that."""
    T = build_tk(k, D.ctx, max_entries)
    if k <= MAX_EXACT_K:
        return verify_decomposition(D, T, max_entries)
    if D.dims != T.dims:
        return False
    rng = rng if rng is not None else np.random.default_rng()
    return certify_decomposition_randomized(D, T, trials, rng)


class BoundsReport(BaseModel):
    """Rank thresholds for T_k: the conditional lower bounds and the known upper bound."""
    k: int = Field(description="Block parameter of T_k.")
    dimension: int = Field(description="C(3k, k), the size of each axis.")
    threshold: RationalValue = Field(description="8^k * C(3k,k) * C(2k,k) / 27^k.")
    simple_threshold: RationalValue = Field(description="(2/9) * 8^k / k.")
    upper_bound: RationalValue = Field(description="8^k / 2, the rank of the character decomposition.")
    naive_upper_bound: RationalValue = Field(description="8^k, the rank over Z_2^{3k}.")
    candidate_rank: Optional[int] = Field(default=None, description="Rank submitted for comparison.")
    refutes_set_cover_conjecture: Optional[bool] = Field(
        default=None, description="True when the candidate rank falls below the threshold."
    )


def rank_threshold(k: int) -> Fraction:
    return Fraction(8**k * binomial(3 * k, k) * binomial(2 * k, k), 27**k)


def simple_rank_threshold(k: int) -> Fraction:
    return Fraction(2 * 8**k, 9 * k)


def bounds_report(k: int, candidate_rank: Optional[int] = None) -> BoundsReport:
    if k < 1:
        raise ParameterError(f"k must be at least 1, got {k}")
    threshold = rank_threshold(k)
    report = BoundsReport(
        k=k,
        dimension=tk_dimension(k),
        threshold=RationalValue.of(threshold),
        simple_threshold=RationalValue.of(simple_rank_threshold(k)),
        upper_bound=RationalValue.of(Fraction(8**k, 2)),
        naive_upper_bound=RationalValue.of(Fraction(8**k)),
    )
    if candidate_rank is not None:
        report.candidate_rank = candidate_rank
        report.refutes_set_cover_conjecture = candidate_rank < threshold
    return report


def support_triples(k: int) -> List[Tuple[SubsetMask, SubsetMask, SubsetMask]]:
    """Support of T_k as subset triples, in (rank S, rank T) order."""
    m = 3 * k
    full = (1 << m) - 1
    out = []
    for s in ksubset_bits(m, k):
        for t in ksubset_bits(m, k):
            if not s & t:
                out.append((SubsetMask(s, m), SubsetMask(t, m), SubsetMask(full ^ s ^ t, m)))
    return out


def kron_support_via_balanced(k: int, r: int, max_pairs: int = 10**7) -> List[Tuple[int, int, int]]:
    """Support of T_k^{⊗r} read off the balanced code: flat index triples of
    (a, b, c) in X^3 with a, b, c pairwise disjoint and a | b | c all ones."""
    _check_k(k, MAX_BUILD_K)
    if r < 1:
        raise ParameterError(f"power must be at least 1, got {r}")
    size = tk_dimension(k) ** r
    if size * size > max_pairs:
        raise GuardExceeded(f"|X|^2 = {size * size} exceeds {max_pairs}")
    members = enumerate_balanced(k, r)
    index = {bits: i for i, bits in enumerate(members)}
    full = (1 << (3 * k * r)) - 1
    out = []
    for i, a in enumerate(members):
        for j, b in enumerate(members):
            if a & b:
                continue
            c = index.get(full ^ a ^ b)
            if c is not None:
                out.append((i, j, c))
    return out
