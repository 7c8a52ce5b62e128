"""Seeded random instances, optionally with a planted solution."""
from typing import List, Optional

import numpy as np

from tkrank.algebra.combinatorics import ksubset_bits, random_permutation
from tkrank.errors import ParameterError
from tkrank.solvers.setcover import SetCoverInstance
from tkrank.solvers.tripartition import TripartitionInstance


def random_tripartition(
    n: int, density: float, rng: np.random.Generator, plant: bool = False
) -> TripartitionInstance:
    """Each n-subset of [3n] joins each family independently with probability ``density``."""
    if n < 0:
        raise ParameterError(f"block size must be non-negative, got {n}")
    if not 0.0 <= density <= 1.0:
        raise ParameterError(f"density must be in [0, 1], got {density}")
    candidates = np.array(ksubset_bits(3 * n, n), dtype=np.int64)
    families = []
    for _ in range(3):
        keep = rng.random(len(candidates)) < density
        families.append({int(b) for b in candidates[keep]})
    if plant:
        for part, bits in enumerate(planted_tripartition(n, rng)):
            families[part].add(bits)
    return TripartitionInstance.from_masks(n, families)


def planted_tripartition(n: int, rng: np.random.Generator) -> List[int]:
    """A uniformly random ordered tripartition of [3n] into n-sets."""
    sigma = random_permutation(3 * n, rng)
    parts = []
    for part in range(3):
        bits = 0
        for e in sigma[part * n:(part + 1) * n]:
            bits |= 1 << e
        parts.append(bits)
    return parts


def random_setcover(
    n: int,
    t: int,
    s: int,
    rng: np.random.Generator,
    count: Optional[int] = None,
    plant: bool = False,
) -> SetCoverInstance:
    """``count`` random sets of size 1..s; ``plant`` adds a partition of [n] into at most t pieces."""
    if s < 1 and n > 0:
        raise ParameterError("s must be at least 1 for a non-empty universe")
    count = 2 * n if count is None else count
    sets = set()
    for _ in range(count):
        if n == 0:
            break
        size = int(rng.integers(1, min(s, n) + 1))
        chosen = rng.choice(n, size=size, replace=False)
        sets.add(sum(1 << int(e) for e in chosen))
    if plant and n > 0:
        pieces = -(-n // s)
        if pieces > t:
            raise ParameterError(f"cannot plant a cover of [{n}] with at most {t} sets of size <= {s}")
        order = random_permutation(n, rng)
        for start in range(0, n, s):
            sets.add(sum(1 << e for e in order[start:start + s]))
    return SetCoverInstance(n, t, s, frozenset(sets))
