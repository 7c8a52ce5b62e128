"""s-set cover and its reduction to balanced tripartitioning.

Pipeline of ``reduce_and_solve``: pad the universe to a multiple of 3,
take the downward closure (covers become partitions), collect unions of
m disjoint closure members of size at most n/3 + s, then for every 3s-set
S and every split S = S1 ⊔ S2 ⊔ S3 hand the trimmed families over the
residual universe [n] \\ S to a tripartition decider.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, List

import numpy as np

from tkrank.algebra.combinatorics import SubsetMask, ksubset_bits, mask_elements
from tkrank.errors import GuardExceeded, InputError, ParameterError
from tkrank.formats import SetCoverFile
from tkrank.solvers.tripartition import TripartitionInstance

logger = logging.getLogger(__name__)

MAX_BRUTE_N = 15
MAX_CLOSURE_S = 20

TriSolver = Callable[[TripartitionInstance], object]


@dataclass(frozen=True)
class SetCoverInstance:
    n: int
    t: int
    s: int
    sets: FrozenSet[int]

    def __post_init__(self):
        if not 0 <= self.n <= 63:
            raise ParameterError(f"universe size {self.n} outside [0, 63]")
        if self.t < 0 or self.s < 0:
            raise ParameterError("t and s must be non-negative")
        for bits in self.sets:
            if bits < 0 or bits >> self.n:
                raise ParameterError(f"set {mask_elements(bits)} is not inside [{self.n}]")
            if bits.bit_count() > self.s:
                raise ParameterError(f"set {mask_elements(bits)} is larger than s={self.s}")

    @classmethod
    def from_subsets(cls, n: int, t: int, s: int, sets: Iterable[Iterable[int]]) -> "SetCoverInstance":
        return cls(n, t, s, frozenset(SubsetMask.from_elements(x, n).bits for x in sets))


@dataclass
class SetCoverOutcome:
    answer: bool
    fallback: bool = False
    calls: int = 0

    def __bool__(self) -> bool:
        return self.answer


def solve_brute_setcover(inst: SetCoverInstance, max_n: int = MAX_BRUTE_N) -> bool:
    """Fewest sets with union exactly each mask, relaxed t rounds over the 2^n lattice."""
    if inst.n > max_n:
        raise GuardExceeded(f"brute-force set cover needs 2^{inst.n} cells; n exceeds {max_n}")
    size = 1 << inst.n
    full = size - 1
    if full == 0:
        return True
    unreachable = np.iinfo(np.int64).max // 2
    best = np.full(size, unreachable, dtype=np.int64)
    best[0] = 0
    masks = np.arange(size, dtype=np.int64)
    for _ in range(inst.t):
        relaxed = best.copy()
        for bits in inst.sets:
            np.minimum.at(relaxed, masks | bits, best + 1)
        if np.array_equal(relaxed, best):
            break
        best = relaxed
    return bool(best[full] <= inst.t)


def downward_closure(family: Iterable[int], max_s: int = MAX_CLOSURE_S) -> FrozenSet[int]:
    """Every subset of every member (the empty set included when the family is non-empty)."""
    closure = set()
    for bits in family:
        if bits.bit_count() > max_s:
            raise GuardExceeded(f"closure of a {bits.bit_count()}-element set exceeds the s <= {max_s} guard")
        sub = bits
        while True:
            closure.add(sub)
            if sub == 0:
                break
            sub = (sub - 1) & bits
    return frozenset(closure)


def disjoint_union_dp(closure: Iterable[int], t: int, cap: int, min_size: int = 0) -> List[FrozenSet[int]]:
    """[U_1, ..., U_t]: unions of m pairwise disjoint closure members with size <= cap,
    filtered afterwards to sizes >= min_size."""
    members = [bits for bits in closure if bits.bit_count() <= cap]
    levels: List[FrozenSet[int]] = []
    if t < 1:
        return levels
    current = frozenset(members)
    raw = [current]
    # with the empty set available U_{m-1} ⊆ U_m, so only fresh unions need extending
    grows = 0 in current
    frontier = current
    for _ in range(2, t + 1):
        source = frontier if grows else current
        fresh = set()
        for a in source:
            for b in members:
                if not a & b:
                    union = a | b
                    if union.bit_count() <= cap:
                        fresh.add(union)
        nxt = (current | fresh) if grows else frozenset(fresh)
        frontier = frozenset(fresh - current)
        current = frozenset(nxt)
        raw.append(current)
    for level in raw:
        levels.append(frozenset(bits for bits in level if bits.bit_count() >= min_size))
    return levels


def pad_universe(inst: SetCoverInstance) -> SetCoverInstance:
    """Add d in {0,1,2} fresh elements, each as its own singleton set, and raise t by d."""
    d = (-inst.n) % 3
    if d == 0:
        return inst
    singletons = {1 << (inst.n + i) for i in range(d)}
    return SetCoverInstance(inst.n + d, inst.t + d, max(inst.s, 1), inst.sets | singletons)


def _compress(bits: int, positions: List[int]) -> int:
    out = 0
    for new, old in enumerate(positions):
        if bits >> old & 1:
            out |= 1 << new
    return out


def _split_families(
    families: List[FrozenSet[int]], S: int, third: int, s: int
) -> List[Dict[int, List[int]]]:
    """Per m: S_i -> [X \\ S_i for X in F'_m with X ∩ S = S_i and |X| = n/3 - s + |S_i|]."""
    out = []
    for family in families:
        groups: Dict[int, List[int]] = {}
        for bits in family:
            inside = bits & S
            if bits.bit_count() == third - s + inside.bit_count():
                groups.setdefault(inside, []).append(bits ^ inside)
        out.append(groups)
    return out


def reduce_and_solve(inst: SetCoverInstance, tri_solver: TriSolver) -> SetCoverOutcome:
    padded = pad_universe(inst)
    n, t, s = padded.n, padded.t, padded.s
    if n == 0:
        return SetCoverOutcome(True)
    if 3 * s > n:
        logger.warning("3s=%s exceeds n=%s; falling back to brute-force set cover", 3 * s, n)
        return SetCoverOutcome(solve_brute_setcover(padded), fallback=True)

    closure = downward_closure(padded.sets)
    third = n // 3
    cap = third + s
    floor = third - s
    dp = disjoint_union_dp(closure, t, cap, floor)
    families = [frozenset({0}) if floor == 0 else frozenset()] + dp

    # closure holds the empty set, so F'_m grows with m and sums t1+t2+t3 = t cover every budget
    triples = [(t1, t2, t - t1 - t2) for t1 in range(t + 1) for t2 in range(t - t1 + 1)]
    full = (1 << n) - 1
    block = third - s
    calls = 0
    seen = set()
    for S in ksubset_bits(n, 3 * s):
        positions = [i for i in range(n) if not S >> i & 1]
        groups = _split_families(families, S, third, s)
        for t1, t2, t3 in triples:
            g1, g2, g3 = groups[t1], groups[t2], groups[t3]
            if not (g1 and g2 and g3):
                continue
            for s1, members1 in g1.items():
                for s2, members2 in g2.items():
                    if s1 & s2:
                        continue
                    s3 = S ^ s1 ^ s2
                    members3 = g3.get(s3)
                    if members3 is None:
                        continue
                    trimmed = tuple(
                        frozenset(_compress(bits, positions) for bits in members)
                        for members in (members1, members2, members3)
                    )
                    if trimmed in seen:
                        continue
                    seen.add(trimmed)
                    for family in trimmed:
                        assert all(bits.bit_count() == block for bits in family), "trimmed member has the wrong size"
                    assert len(positions) == 3 * block and (full ^ S).bit_count() == 3 * block
                    calls += 1
                    if tri_solver(TripartitionInstance(block, trimmed)):
                        logger.debug("set cover reduction: yes after %s tripartition calls", calls)
                        return SetCoverOutcome(True, calls=calls)
    logger.debug("set cover reduction: no after %s tripartition calls", calls)
    return SetCoverOutcome(False, calls=calls)


def setcover_from_file(doc: SetCoverFile) -> SetCoverInstance:
    try:
        return SetCoverInstance.from_subsets(doc.n, doc.t, doc.s, doc.sets)
    except ParameterError as e:
        raise InputError(str(e)) from e


def setcover_to_file(inst: SetCoverInstance) -> SetCoverFile:
    return SetCoverFile(n=inst.n, t=inst.t, s=inst.s, sets=[mask_elements(bits) for bits in sorted(inst.sets)])
