from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tkrank.algebra.combinatorics import random_permutation
from tkrank.algebra.tk import group_decomposition
from tkrank.errors import GuardExceeded, InputError, ParameterError
from tkrank.formats import TripartitionFile
from tkrank.generators import planted_tripartition, random_tripartition
from tkrank.solvers.tripartition import (
    TripartitionInstance,
    count_brute,
    count_wht,
    instance_from_file,
    instance_to_file,
    pad_instance,
    plan_trials,
    solve_brute,
    solve_tensor,
    solve_wht,
    success_probability,
    walsh_hadamard,
    witness_to_lists,
    witness_survives,
)

SINGLETONS = [[[1]], [[2]], [[3]]]
ALL_SINGLETONS = [[[1], [2], [3]]] * 3


def _random_instances(count, max_n, seed, plant_every=2):
    rng = np.random.default_rng(seed)
    for i in range(count):
        n = int(rng.integers(1, max_n + 1))
        yield random_tripartition(n, float(rng.uniform(0.02, 0.4)), rng, plant=i % plant_every == 0)


def test_brute_finds_the_witness():
    outcome = solve_brute(TripartitionInstance.from_subsets(1, SINGLETONS))
    assert outcome.answer
    assert witness_to_lists(outcome.witness) == [[1], [2], [3]]


def test_brute_rejects_overlapping_families():
    assert not solve_brute(TripartitionInstance.from_subsets(1, [[[1]], [[1]], [[1]]]))


@pytest.mark.parametrize("families, count", [(SINGLETONS, 1), (ALL_SINGLETONS, 6), ([[], [[2]], [[3]]], 0)])
def test_fourier_counts_ordered_solutions(families, count):
    inst = TripartitionInstance.from_subsets(1, families)
    assert count_wht(inst) == count == count_brute(inst)
    assert solve_wht(inst).answer == (count > 0)
    assert solve_wht(inst).count == count


def test_fourier_guard():
    with pytest.raises(GuardExceeded):
        solve_wht(TripartitionInstance(9, (frozenset(), frozenset(), frozenset())))


def test_instance_validation():
    with pytest.raises(ParameterError):
        TripartitionInstance.from_masks(1, [[0b11], [], []])
    with pytest.raises(ParameterError):
        TripartitionInstance.from_masks(1, [[1 << 3], [], []])
    with pytest.raises(ParameterError):
        TripartitionInstance.from_masks(1, [[1], [2]])


@given(st.integers(min_value=1, max_value=12), st.integers(min_value=0, max_value=2**31))
@settings(max_examples=30)
def test_walsh_hadamard_is_an_involution_up_to_scale(m, seed):
    table = np.random.default_rng(seed).integers(-5, 6, size=1 << m).astype(np.int64)
    twice = walsh_hadamard(walsh_hadamard(table.copy()))
    assert np.array_equal(twice, table * (1 << m))


def test_walsh_hadamard_needs_a_power_of_two():
    with pytest.raises(ParameterError):
        walsh_hadamard(np.zeros(6, dtype=np.int64))


def test_brute_and_fourier_agree():
    for inst in _random_instances(100, 4, seed=1):
        assert solve_brute(inst).answer == solve_wht(inst).answer
        assert count_brute(inst) == count_wht(inst)


@pytest.mark.slow
def test_brute_and_fourier_agree_on_full_corpus():
    for inst in _random_instances(500, 4, seed=2):
        assert count_brute(inst) == count_wht(inst)


def test_planted_instances_are_yes_instances(rng):
    for n in range(1, 6):
        assert solve_brute(random_tripartition(n, 0.0, rng, plant=True)).answer


def test_padding_is_identity_when_k_divides_n():
    inst = TripartitionInstance.from_subsets(1, SINGLETONS)
    assert pad_instance(inst, 1) is inst


def test_padding_appends_one_block_per_family():
    inst = TripartitionInstance.from_subsets(2, [[[1, 2]], [[3, 4]], [[5, 6]]])
    padded = pad_instance(inst, 3)
    assert padded.n == 3
    assert [[s.elements() for s in padded.family(i)] for i in range(3)] == [[[1, 2, 7]], [[3, 4, 8]], [[5, 6, 9]]]


def test_padding_preserves_answers():
    for inst in _random_instances(50, 3, seed=3):
        for k in (2, 3):
            assert count_brute(pad_instance(inst, k)) == count_brute(inst)


@pytest.mark.parametrize("n, k, p", [(1, 1, Fraction(1)), (2, 2, Fraction(1)), (2, 1, Fraction(2, 5)), (3, 1, Fraction(9, 70))])
def test_success_probability(n, k, p):
    assert success_probability(n, k) == p


def test_success_probability_needs_k_to_divide_n():
    with pytest.raises(ParameterError):
        success_probability(3, 2)


def test_trial_plan():
    plan = plan_trials(2, 1, 5.0)
    assert (plan.r, plan.p, plan.trials) == (2, Fraction(2, 5), 13)
    assert plan_trials(1, 1, 1.0).trials == 1
    with pytest.raises(ParameterError):
        plan_trials(2, 1, 0.0)


def test_witness_survival_frequency(rng):
    witness = planted_tripartition(2, rng)
    draws = 10_000
    hits = sum(witness_survives(witness, random_permutation(6, rng), 1, 2) for _ in range(draws))
    assert abs(hits / draws - 0.4) <= 0.02


def test_tensor_solver_never_accepts_no_instances(ctx):
    D = group_decomposition(1, ctx)
    seen = 0
    for i, inst in enumerate(_random_instances(600, 3, seed=4, plant_every=10**9)):
        if solve_brute(inst).answer:
            continue
        seen += 1
        assert not solve_tensor(inst, D, 1, lam=5.0, rng=np.random.default_rng(i)).answer
        if seen == 100:
            break
    assert seen == 100


def test_tensor_solver_with_k2_never_accepts_no_instances(ctx):
    D = group_decomposition(2, ctx)
    seen = 0
    for i, inst in enumerate(_random_instances(400, 4, seed=11, plant_every=10**9)):
        if solve_brute(inst).answer:
            continue
        seen += 1
        assert not solve_tensor(inst, D, 2, lam=5.0, rng=np.random.default_rng(i)).answer
        if seen == 100:
            break
    assert seen == 100


def test_tensor_solver_evaluation_guard(ctx):
    D = group_decomposition(1, ctx)
    inst = TripartitionInstance.from_subsets(3, [[[1, 2, 3]], [[4, 5, 6]], [[7, 8, 9]]])
    with pytest.raises(GuardExceeded):
        solve_tensor(inst, D, 1, rng=np.random.default_rng(0), max_entries=63)
    assert solve_tensor(inst, D, 1, lam=10.0, rng=np.random.default_rng(0), max_entries=64).answer


def test_tensor_solver_single_trial_when_p_is_one(ctx):
    D = group_decomposition(1, ctx)
    outcome = solve_tensor(TripartitionInstance.from_subsets(1, SINGLETONS), D, 1, lam=1.0, rng=np.random.default_rng(0))
    assert outcome.answer
    assert outcome.trials_used == 1
    assert outcome.probability == 1


def test_tensor_solver_detection_rate(ctx):
    D = group_decomposition(1, ctx)
    detected = 0
    for seed in range(200):
        rng = np.random.default_rng(seed)
        inst = random_tripartition(2, 0.1, rng, plant=True)
        detected += solve_tensor(inst, D, 1, lam=5.0, rng=rng).answer
    assert detected >= 190


def test_tensor_solver_with_k2_pads_odd_n(ctx, rng):
    D = group_decomposition(2, ctx)
    inst = random_tripartition(3, 0.05, rng, plant=True)
    assert solve_tensor(inst, D, 2, lam=10.0, rng=rng).answer


def test_tensor_solver_threads_and_small_sample_set(ctx):
    D = group_decomposition(1, ctx)
    no = TripartitionInstance.from_subsets(1, [[[1]], [[1]], [[2]]])
    yes = TripartitionInstance.from_subsets(2, [[[1, 2]], [[3, 4]], [[5, 6]]])
    assert not solve_tensor(no, D, 1, rng=np.random.default_rng(5), threads=2).answer
    assert not solve_tensor(no, D, 1, rng=np.random.default_rng(5), sample_set_size=4).answer
    assert solve_tensor(yes, D, 1, lam=10.0, rng=np.random.default_rng(5), threads=3).answer


def test_tensor_solver_rejects_mismatched_decomposition(ctx):
    with pytest.raises(ParameterError):
        solve_tensor(TripartitionInstance.from_subsets(1, SINGLETONS), group_decomposition(1, ctx), 2)


def test_instance_file_round_trip(rng):
    inst = random_tripartition(3, 0.2, rng, plant=True)
    assert instance_from_file(TripartitionFile.model_validate_json(instance_to_file(inst).model_dump_json())) == inst


def test_instance_file_validation():
    with pytest.raises(InputError):
        instance_from_file(TripartitionFile(n=1, families=[[[1]], [[2]]]))
    with pytest.raises(InputError):
        instance_from_file(TripartitionFile(n=1, families=[[[1, 2]], [[2]], [[3]]]))
