"""Balanced tripartitioning: given F1, F2, F3 of n-subsets of [3n], decide
whether some S_i in F_i partition [3n].

Three deciders share one instance type: brute force, the 8^n Fourier
count over Z_2^{3n}, and randomized evaluation of T_k^{⊗r} through a
rank decomposition.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

import joblib
import numpy as np

from tkrank.algebra.combinatorics import (
    Permutation,
    SubsetMask,
    balanced_flat_index,
    binomial,
    permute_bits,
    random_permutation,
)
from tkrank.algebra.field import FieldContext, WideInt, sample_from_set, sample_uniform
from tkrank.algebra.tensor import DEFAULT_MAX_ENTRIES, Decomposition, eval_kron_via_decomposition, kron_evaluation_size
from tkrank.errors import GuardExceeded, InputError, ParameterError
from tkrank.formats import TripartitionFile

logger = logging.getLogger(__name__)

DEFAULT_MAX_N = 8
DEFAULT_LAMBDA = 5.0

Witness = Tuple[SubsetMask, SubsetMask, SubsetMask]


@dataclass(frozen=True)
class TripartitionInstance:
    """Families are stored as deduplicated raw masks over [3n] (element i at bit i-1)."""
    n: int
    families: Tuple[FrozenSet[int], FrozenSet[int], FrozenSet[int]]

    def __post_init__(self):
        if self.n < 0:
            raise ParameterError(f"block size must be non-negative, got {self.n}")
        if len(self.families) != 3:
            raise ParameterError(f"expected three families, got {len(self.families)}")
        limit = 1 << (3 * self.n)
        for position, family in enumerate(self.families):
            for bits in family:
                if not 0 <= bits < limit:
                    raise ParameterError(f"family {position + 1} has a member outside [{3 * self.n}]")
                if bits.bit_count() != self.n:
                    raise ParameterError(f"family {position + 1} has a member of size {bits.bit_count()}, expected {self.n}")

    @classmethod
    def from_masks(cls, n: int, families: Sequence[Iterable[int]]) -> "TripartitionInstance":
        return cls(n, tuple(frozenset(int(b) for b in family) for family in families))

    @classmethod
    def from_subsets(cls, n: int, families: Sequence[Iterable[Iterable[int]]]) -> "TripartitionInstance":
        m = 3 * n
        return cls.from_masks(n, [[SubsetMask.from_elements(s, m).bits for s in family] for family in families])

    @property
    def universe(self) -> int:
        return 3 * self.n

    def family(self, i: int) -> List[SubsetMask]:
        return [SubsetMask(bits, self.universe) for bits in sorted(self.families[i])]


@dataclass
class TripartitionOutcome:
    answer: bool
    witness: Optional[Witness] = None
    count: Optional[int] = None
    trials_used: int = 0
    probability: Optional[Fraction] = None
    algo: str = ""

    def __bool__(self) -> bool:
        return self.answer


@dataclass(frozen=True)
class TrialPlan:
    k: int
    r: int
    p: Fraction
    trials: int
    lam: float


def solve_brute(inst: TripartitionInstance) -> TripartitionOutcome:
    """Pair F1 x F2, look the complement up in F3."""
    full = (1 << inst.universe) - 1
    f1, f2, f3 = inst.families
    for s1 in sorted(f1):
        for s2 in sorted(f2):
            if s1 & s2:
                continue
            s3 = full ^ s1 ^ s2
            if s3 in f3:
                m = inst.universe
                return TripartitionOutcome(True, (SubsetMask(s1, m), SubsetMask(s2, m), SubsetMask(s3, m)), algo="brute")
    return TripartitionOutcome(False, algo="brute")


def count_brute(inst: TripartitionInstance) -> int:
    full = (1 << inst.universe) - 1
    f1, f2, f3 = inst.families
    return sum(1 for s1 in f1 for s2 in f2 if not s1 & s2 and (full ^ s1 ^ s2) in f3)


def walsh_hadamard(table: np.ndarray) -> np.ndarray:
    """In-place Walsh-Hadamard transform over every axis of Z_2^m."""
    size = table.shape[0]
    if size & (size - 1):
        raise ParameterError(f"table length {size} is not a power of two")
    h = 1
    while h < size:
        view = table.reshape(-1, 2, h)
        low = view[:, 0, :].copy()
        view[:, 0, :] += view[:, 1, :]
        view[:, 1, :] = low - view[:, 1, :]
        h <<= 1
    return table


def _parity_signs(m: int) -> np.ndarray:
    signs = np.ones(1, dtype=np.int64)
    for _ in range(m):
        signs = np.concatenate([signs, -signs])
    return signs


def count_wht(inst: TripartitionInstance, max_n: int = DEFAULT_MAX_N) -> WideInt:
    """(f1 * f2 * f3)(1^{3n}) by Fourier inversion: the number of ordered solutions."""
    if inst.n > max_n:
        raise GuardExceeded(f"Fourier solver needs 2^{inst.universe} cells; n={inst.n} exceeds max_n={max_n}")
    m = inst.universe
    size = 1 << m
    hats = []
    for family in inst.families:
        table = np.zeros(size, dtype=np.int64)
        if family:
            table[np.fromiter(family, dtype=np.int64)] = 1
        hats.append(walsh_hadamard(table))
    signs = _parity_signs(m)
    bound = len(inst.families[0]) * len(inst.families[1]) * len(inst.families[2]) * size
    if bound < (1 << 62):
        total = int(np.sum(hats[0] * hats[1] * hats[2] * signs))
    else:
        # Python ints in object arrays
        h1, h2, h3 = (h.astype(object) for h in hats)
        total = int(np.sum(h1 * h2 * h3 * signs.astype(object)))
    count, remainder = divmod(total, size)
    assert remainder == 0, "Fourier inversion must be exact"
    return count


def solve_wht(inst: TripartitionInstance, max_n: int = DEFAULT_MAX_N) -> TripartitionOutcome:
    count = count_wht(inst, max_n)
    return TripartitionOutcome(count > 0, count=count, algo="wht")


def pad_instance(inst: TripartitionInstance, k: int) -> TripartitionInstance:
    """Grow n to the next multiple of k, extending F_i by a fixed block S_i of new elements."""
    if k < 1:
        raise ParameterError(f"k must be at least 1, got {k}")
    n0 = inst.n
    n = k * math.ceil(n0 / k)
    extra = n - n0
    if extra == 0:
        return inst
    base = 3 * n0
    blocks = [((1 << extra) - 1) << (base + extra * i) for i in range(3)]
    return TripartitionInstance(
        n, tuple(frozenset(bits | block for bits in family) for family, block in zip(inst.families, blocks))
    )


def success_probability(n: int, k: int) -> Fraction:
    """(C(3k,k) C(2k,k))^r / (C(3n,n) C(2n,n)) with r = n/k."""
    if k < 1 or n % k:
        raise ParameterError(f"k={k} does not divide n={n}")
    r = n // k
    return Fraction((binomial(3 * k, k) * binomial(2 * k, k)) ** r, binomial(3 * n, n) * binomial(2 * n, n))


def plan_trials(n: int, k: int, lam: float = DEFAULT_LAMBDA) -> TrialPlan:
    if lam <= 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    p = success_probability(n, k)
    trials = max(1, math.ceil(Fraction(lam) / p))
    return TrialPlan(k=k, r=n // k, p=p, trials=trials, lam=lam)


def witness_survives(witness: Sequence[int], sigma: Permutation, k: int, r: int) -> bool:
    """Whether all three permuted witness masks land in the balanced code X."""
    return all(balanced_flat_index(permute_bits(sigma, bits), k, r) is not None for bits in witness)


def _restricted_vector(
    family: FrozenSet[int],
    sigma: Permutation,
    k: int,
    r: int,
    length: int,
    ctx: FieldContext,
    rng: np.random.Generator,
    sample_set: Optional[Sequence[int]],
) -> np.ndarray:
    # sparse index -> value first, densified once
    values = {}
    for bits in sorted(family):
        index = balanced_flat_index(permute_bits(sigma, bits), k, r)
        if index is None:
            continue
        values[index] = sample_uniform(ctx, rng) if sample_set is None else sample_from_set(sample_set, ctx, rng)
    vec = ctx.zeros(length)
    for index, value in values.items():
        vec[index] = value
    return vec


def _run_trial(
    inst: TripartitionInstance,
    D: Decomposition,
    k: int,
    r: int,
    rng: np.random.Generator,
    sample_set: Optional[Sequence[int]],
    max_entries: int = DEFAULT_MAX_ENTRIES,
) -> bool:
    sigma = random_permutation(inst.universe, rng)
    length = D.dims[0] ** r
    x, y, z = (_restricted_vector(family, sigma, k, r, length, D.ctx, rng, sample_set) for family in inst.families)
    if not (np.any(x) and np.any(y) and np.any(z)):
        return False
    return eval_kron_via_decomposition(D, r, x, y, z, max_entries) != 0


def solve_tensor(
    inst: TripartitionInstance,
    D: Decomposition,
    k: int,
    lam: float = DEFAULT_LAMBDA,
    rng: Optional[np.random.Generator] = None,
    threads: int = 1,
    sample_set_size: Optional[int] = None,
    max_entries: int = DEFAULT_MAX_ENTRIES,
) -> TripartitionOutcome:
    """Randomized decider through T_k^{⊗r}; one-sided, never accepts a no-instance.

    ``D`` must be an exact decomposition of T_k.  ``sample_set_size=4`` draws
    evaluation values from {0, 1, 2, 3} instead of the whole field.  Raises
    GuardExceeded when one evaluation of T_k^{⊗r} would hold more than
    ``max_entries`` values per leg.
    """
    side = binomial(3 * k, k)
    if D.dims != (side, side, side):
        raise ParameterError(f"decomposition dims {D.dims} do not match T_{k} (side {side})")
    if sample_set_size is not None and not 1 <= sample_set_size <= D.ctx.p:
        raise ParameterError(f"sample set size must be in [1, {D.ctx.p}]")
    sample_set = None if sample_set_size is None else tuple(range(sample_set_size))
    rng = rng if rng is not None else np.random.default_rng()
    padded = pad_instance(inst, k)
    plan = plan_trials(padded.n, k, lam)
    buffer = kron_evaluation_size(D, plan.r)
    if buffer > max_entries:
        raise GuardExceeded(f"n={padded.n} needs {buffer} entries per evaluation at k={k}, above the guard of {max_entries}")
    logger.debug("tensor solve: n=%s k=%s r=%s trials=%s p=%s", padded.n, k, plan.r, plan.trials, plan.p)
    streams = rng.spawn(plan.trials)

    if threads <= 1:
        for used, stream in enumerate(streams, start=1):
            if _run_trial(padded, D, k, plan.r, stream, sample_set, max_entries):
                return TripartitionOutcome(True, trials_used=used, probability=plan.p, algo="tensor")
        return TripartitionOutcome(False, trials_used=plan.trials, probability=plan.p, algo="tensor")

    found = False
    used = 0
    # results arrive in completion order; leaving the loop early aborts the rest
    with joblib.Parallel(n_jobs=threads, prefer="threads", batch_size=1, return_as="generator_unordered") as parallel:
        trials = parallel(
            joblib.delayed(_run_trial)(padded, D, k, plan.r, stream, sample_set, max_entries) for stream in streams
        )
        for result in trials:
            used += 1
            if result:
                found = True
                break
    return TripartitionOutcome(found, trials_used=used, probability=plan.p, algo="tensor")


def instance_from_file(doc: TripartitionFile) -> TripartitionInstance:
    if len(doc.families) != 3:
        raise InputError(f"families: expected 3 families, got {len(doc.families)}")
    try:
        return TripartitionInstance.from_subsets(doc.n, doc.families)
    except ParameterError as e:
        raise InputError(str(e)) from e


def instance_to_file(inst: TripartitionInstance) -> TripartitionFile:
    return TripartitionFile(n=inst.n, families=[[s.elements() for s in inst.family(i)] for i in range(3)])


def witness_to_lists(witness: Optional[Witness]) -> Optional[List[List[int]]]:
    return None if witness is None else [s.elements() for s in witness]
