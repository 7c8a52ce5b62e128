import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tkrank.algebra.combinatorics import (
    BalancedIndex,
    SubsetMask,
    apply_permutation,
    balanced_decode,
    balanced_encode,
    balanced_flat_index,
    binomial,
    enumerate_balanced,
    enumerate_ksubsets,
    ksubset_bits,
    permute_bits,
    random_permutation,
    rank_bits,
    rank_ksubset,
    unrank_ksubset,
)
from tkrank.errors import ParameterError


def test_binomial_values():
    assert binomial(33, 11) == 193536720
    assert binomial(33, 11) > 10**8
    assert binomial(3, 5) == 0
    assert binomial(4, -1) == 0
    assert binomial(0, 0) == 1


def test_colex_rank_example():
    assert rank_ksubset(SubsetMask.from_elements([3, 4], 6), 2) == 5


def test_rank_rejects_wrong_cardinality():
    with pytest.raises(ParameterError):
        rank_ksubset(SubsetMask.from_elements([1, 2, 3], 6), 2)


def test_ksubsets_come_in_colex_order():
    for m, k in [(3, 1), (6, 2), (9, 3), (7, 0)]:
        masks = ksubset_bits(m, k)
        assert len(masks) == binomial(m, k)
        assert [rank_bits(b) for b in masks] == list(range(len(masks)))


def test_first_ksubsets_of_six():
    assert [s.elements() for s in enumerate_ksubsets(6, 2)[:4]] == [[1, 2], [1, 3], [2, 3], [1, 4]]


@given(st.data())
def test_unrank_inverts_rank(data):
    m = data.draw(st.integers(min_value=1, max_value=14))
    k = data.draw(st.integers(min_value=0, max_value=m))
    i = data.draw(st.integers(min_value=0, max_value=binomial(m, k) - 1))
    S = unrank_ksubset(i, m, k)
    assert len(S) == k
    assert rank_ksubset(S, k) == i


def test_unrank_out_of_range():
    with pytest.raises(ParameterError):
        unrank_ksubset(binomial(6, 2), 6, 2)


def test_subset_mask_operations():
    S = SubsetMask.from_elements([1, 3], 4)
    T = SubsetMask.from_elements([2], 4)
    assert str(S) == "{1,3}"
    assert 3 in S and 2 not in S
    assert S.isdisjoint(T)
    assert (S | T).elements() == [1, 2, 3]
    assert S.complement().elements() == [2, 4]
    assert len(SubsetMask.full(5)) == 5
    with pytest.raises(ParameterError):
        SubsetMask.from_elements([5], 4)
    with pytest.raises(ParameterError):
        SubsetMask(1 << 70, 64)


@given(st.integers(min_value=0, max_value=2**31))
def test_random_permutations_preserve_size(seed):
    rng = np.random.default_rng(seed)
    sigma = random_permutation(9, rng)
    assert sorted(sigma) == list(range(9))
    bits = 0b101100101
    assert permute_bits(sigma, bits).bit_count() == bits.bit_count()


def test_apply_permutation_moves_elements():
    sigma = (2, 0, 1)
    image = apply_permutation(sigma, [SubsetMask.from_elements([1], 3), SubsetMask.from_elements([2, 3], 3)])
    assert [s.elements() for s in image] == [[3], [1, 2]]


def test_balanced_index_is_first_block_major():
    assert BalancedIndex((1, 2), 1, 2).flat == 5
    with pytest.raises(ParameterError):
        BalancedIndex((3,), 1, 1)


def test_enumerate_balanced_orders_by_flat_index():
    members = enumerate_balanced(1, 2)
    assert len(members) == 9
    assert [balanced_flat_index(b, 1, 2) for b in members] == list(range(9))
    assert len(enumerate_balanced(2, 2)) == 15**2


def test_unbalanced_strings_are_filtered_not_errors():
    x = SubsetMask.from_elements([1, 2], 6)
    assert balanced_encode(x, 1, 2) is None
    assert balanced_flat_index(x.bits, 1, 2) is None
    with pytest.raises(ParameterError):
        balanced_encode(x, 1, 3)


@given(st.data())
def test_balanced_decode_inverts_encode(data):
    k = data.draw(st.integers(min_value=1, max_value=2))
    r = data.draw(st.integers(min_value=1, max_value=3))
    ranks = tuple(data.draw(st.integers(min_value=0, max_value=binomial(3 * k, k) - 1)) for _ in range(r))
    b = BalancedIndex(ranks, k, r)
    x = balanced_decode(b)
    assert balanced_encode(x, k, r) == b
    assert balanced_flat_index(x.bits, k, r) == b.flat


def test_pascal_identity():
    for n in range(1, 41):
        for k in range(1, n + 1):
            assert binomial(n, k) == binomial(n - 1, k - 1) + binomial(n - 1, k)


def test_permutations_of_three_are_uniform():
    rng = np.random.default_rng(77)
    draws = 10_000
    counts = {}
    for _ in range(draws):
        sigma = random_permutation(3, rng)
        counts[sigma] = counts.get(sigma, 0) + 1
    assert len(counts) == 6
    assert all(abs(c / draws - 1 / 6) <= 0.02 for c in counts.values())


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("r", [1, 2, 3])
def test_balanced_code_size(k, r):
    assert len(enumerate_balanced(k, r)) == binomial(3 * k, k) ** r
