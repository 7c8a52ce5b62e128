"""Bitmask subsets of a 1-indexed ground set [m].

Element i is stored at bit i - 1.  Ranking is colexicographic:
rank(S) = sum_j C(s_j - 1, j) over the sorted elements s_1 < ... < s_k.
"""
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterable, List, Optional, Tuple

import numpy as np

from tkrank.errors import ParameterError

MAX_GROUND = 63

Permutation = Tuple[int, ...]


@dataclass(frozen=True, order=True)
class SubsetMask:
    bits: int
    m: int

    def __post_init__(self):
        if not 0 <= self.m <= MAX_GROUND:
            raise ParameterError(f"ground set size {self.m} outside [0, {MAX_GROUND}]")
        if self.bits < 0 or self.bits >> self.m:
            raise ParameterError(f"mask {self.bits:#x} has bits outside [{self.m}]")

    @classmethod
    def from_elements(cls, elements: Iterable[int], m: int) -> "SubsetMask":
        bits = 0
        for e in elements:
            if not 1 <= e <= m:
                raise ParameterError(f"element {e} outside [1, {m}]")
            bits |= 1 << (e - 1)
        return cls(bits, m)

    @classmethod
    def full(cls, m: int) -> "SubsetMask":
        return cls((1 << m) - 1, m)

    def elements(self) -> List[int]:
        return mask_elements(self.bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, element: int) -> bool:
        return 1 <= element <= self.m and bool(self.bits >> (element - 1) & 1)

    def __or__(self, other: "SubsetMask") -> "SubsetMask":
        return SubsetMask(self.bits | other.bits, max(self.m, other.m))

    def __and__(self, other: "SubsetMask") -> "SubsetMask":
        return SubsetMask(self.bits & other.bits, max(self.m, other.m))

    def isdisjoint(self, other: "SubsetMask") -> bool:
        return not self.bits & other.bits

    def complement(self) -> "SubsetMask":
        return SubsetMask(((1 << self.m) - 1) & ~self.bits, self.m)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.elements())) + "}"


def mask_elements(bits: int) -> List[int]:
    out = []
    position = 1
    while bits:
        if bits & 1:
            out.append(position)
        bits >>= 1
        position += 1
    return out


@lru_cache(maxsize=None)
def binomial(n: int, k: int) -> int:
    """Exact C(n, k); zero outside 0 <= k <= n."""
    if k < 0 or n < 0 or k > n:
        return 0
    return comb(n, k)


def rank_ksubset(S: SubsetMask, k: int) -> int:
    if len(S) != k:
        raise ParameterError(f"subset {S} has {len(S)} elements, expected {k}")
    return rank_bits(S.bits)


def rank_bits(bits: int) -> int:
    """Colex rank of a raw mask, cardinality implied."""
    rank = 0
    j = 1
    position = 0
    while bits:
        if bits & 1:
            rank += binomial(position, j)
            j += 1
        bits >>= 1
        position += 1
    return rank


def unrank_ksubset(i: int, m: int, k: int) -> SubsetMask:
    total = binomial(m, k)
    if not 0 <= i < total:
        raise ParameterError(f"rank {i} outside [0, C({m},{k})={total})")
    bits = 0
    # pick the largest element first: the biggest s with C(s-1, j) <= i
    for j in range(k, 0, -1):
        s = j
        while binomial(s, j) <= i:
            s += 1
        i -= binomial(s - 1, j)
        bits |= 1 << (s - 1)
    return SubsetMask(bits, m)


@lru_cache(maxsize=64)
def _ksubset_bits(m: int, k: int) -> Tuple[int, ...]:
    # Gosper's hack walks k-subsets in increasing integer order, which is colex
    if k == 0:
        return (0,)
    out = []
    bits = (1 << k) - 1
    limit = 1 << m
    while bits < limit:
        out.append(bits)
        low = bits & -bits
        ripple = bits + low
        bits = (((ripple ^ bits) >> 2) // low) | ripple
    return tuple(out)


def ksubset_bits(m: int, k: int) -> Tuple[int, ...]:
    """All k-subsets of [m] as raw masks, in colex order."""
    if not 0 <= k <= m:
        raise ParameterError(f"need 0 <= k <= m, got k={k}, m={m}")
    return _ksubset_bits(m, k)


def enumerate_ksubsets(m: int, k: int) -> List[SubsetMask]:
    return [SubsetMask(bits, m) for bits in ksubset_bits(m, k)]


def random_permutation(m: int, rng: np.random.Generator) -> Permutation:
    """Uniform permutation of [m] (0-indexed images), Fisher-Yates."""
    sigma = list(range(m))
    for i in range(m - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        sigma[i], sigma[j] = sigma[j], sigma[i]
    return tuple(sigma)


def permute_bits(sigma: Permutation, bits: int) -> int:
    out = 0
    position = 0
    while bits:
        if bits & 1:
            out |= 1 << sigma[position]
        bits >>= 1
        position += 1
    return out


def apply_permutation(sigma: Permutation, family: Iterable[SubsetMask]) -> List[SubsetMask]:
    """Image family sigma(F) = {sigma(Y) : Y in F}; element e goes to sigma[e-1] + 1."""
    return [SubsetMask(permute_bits(sigma, member.bits), member.m) for member in family]


@dataclass(frozen=True)
class BalancedIndex:
    """Mixed-radix position of a balanced string: one colex rank per 3k-block."""
    ranks: Tuple[int, ...]
    k: int
    r: int

    def __post_init__(self):
        if len(self.ranks) != self.r:
            raise ParameterError(f"expected {self.r} block ranks, got {len(self.ranks)}")
        radix = binomial(3 * self.k, self.k)
        if any(not 0 <= rank < radix for rank in self.ranks):
            raise ParameterError(f"block rank outside [0, {radix})")

    @property
    def flat(self) -> int:
        """Outer-major flattening, first block most significant."""
        radix = binomial(3 * self.k, self.k)
        index = 0
        for rank in self.ranks:
            index = index * radix + rank
        return index


def balanced_flat_index(bits: int, k: int, r: int) -> Optional[int]:
    """Flat index of ``bits`` in X, or None when some block has weight != k."""
    width = 3 * k
    block_mask = (1 << width) - 1
    radix = binomial(width, k)
    index = 0
    for b in range(r):
        block = (bits >> (width * b)) & block_mask
        if block.bit_count() != k:
            return None
        index = index * radix + rank_bits(block)
    return index


def balanced_encode(x: SubsetMask, k: int, r: int) -> Optional[BalancedIndex]:
    """Block ranks of x, or None when x is not in X (a filter, not an error)."""
    if x.m != 3 * r * k:
        raise ParameterError(f"string over [{x.m}] cannot be split into {r} blocks of length {3 * k}")
    width = 3 * k
    block_mask = (1 << width) - 1
    ranks = []
    for b in range(r):
        block = (x.bits >> (width * b)) & block_mask
        if block.bit_count() != k:
            return None
        ranks.append(rank_bits(block))
    return BalancedIndex(tuple(ranks), k, r)


def balanced_decode(b: BalancedIndex) -> SubsetMask:
    width = 3 * b.k
    bits = 0
    for block, rank in enumerate(b.ranks):
        bits |= unrank_ksubset(rank, width, b.k).bits << (width * block)
    return SubsetMask(bits, width * b.r)


def enumerate_balanced(k: int, r: int) -> List[int]:
    """Every member of X as a raw mask, ordered by flat index."""
    blocks = ksubset_bits(3 * k, k)
    out = [0]
    for b in range(r):
        shift = 3 * k * b
        out = [prefix | (block << shift) for prefix in out for block in blocks]
    return out
