import numpy as np
import pytest

from tkrank.errors import ParameterError
from tkrank.generators import planted_tripartition, random_setcover, random_tripartition
from tkrank.solvers.setcover import solve_brute_setcover
from tkrank.solvers.tripartition import count_brute


def test_planted_tripartition_partitions_the_universe(rng):
    parts = planted_tripartition(4, rng)
    assert [p.bit_count() for p in parts] == [4, 4, 4]
    assert parts[0] | parts[1] | parts[2] == (1 << 12) - 1


def test_density_extremes(rng):
    empty = random_tripartition(2, 0.0, rng)
    assert all(not family for family in empty.families)
    full = random_tripartition(2, 1.0, rng)
    assert all(len(family) == 15 for family in full.families)
    assert count_brute(full) == 90


def test_same_seed_same_instance():
    first = random_tripartition(3, 0.3, np.random.default_rng(8), plant=True)
    second = random_tripartition(3, 0.3, np.random.default_rng(8), plant=True)
    assert first == second


def test_generator_parameter_checks(rng):
    with pytest.raises(ParameterError):
        random_tripartition(2, 1.5, rng)
    with pytest.raises(ParameterError):
        random_setcover(7, 2, 3, rng, plant=True)


def test_planted_set_cover_is_a_yes_instance(rng):
    for n in range(1, 10):
        inst = random_setcover(n, 4, 3, rng, count=2, plant=True)
        assert all(bits.bit_count() <= 3 for bits in inst.sets)
        assert solve_brute_setcover(inst)
