from fractions import Fraction

import pytest

from tkrank.algebra.tk import bounds_report
from tkrank.analysis import (
    base_per_block,
    corollary_threshold_table,
    format_runtime_table,
    format_threshold_table,
    runtime_base_table,
    smallest_winning_k,
)
from tkrank.errors import ParameterError


@pytest.fixture(scope="module")
def rows():
    return runtime_base_table(60)


def test_smallest_k_beating_fourier(rows):
    assert smallest_winning_k(rows) == 11
    assert not rows[9].beats_fourier
    assert rows[10].beats_fourier


def test_k1_base():
    row = runtime_base_table(1)[0]
    assert row.base_per_block.fraction() == Fraction(27, 2)
    assert base_per_block(1, 3) == Fraction(27, 2)


def test_per_element_base_approaches_its_limit(rows):
    assert abs(rows[49].base_per_element - 3 / 2 ** (2 / 3)) < 0.05


def test_unconditional_base_never_beats_fourier(rows):
    assert not any(row.unconditional_beats_fourier for row in rows)


def test_float_columns_agree_with_exact_values(rows):
    for row in rows[:30]:
        exact = float(row.base_per_block.fraction()) ** (1 / row.k)
        assert row.base_per_n == pytest.approx(exact, rel=1e-10)


def test_no_winner_below_eleven():
    assert smallest_winning_k(runtime_base_table(10)) == 0


def test_table_range_is_guarded():
    with pytest.raises(ParameterError):
        runtime_base_table(0)
    with pytest.raises(ParameterError):
        corollary_threshold_table(201)


def test_threshold_table_delegates_to_bounds_report():
    table = corollary_threshold_table(50)
    assert table[0].report == bounds_report(1)
    ratios = [row.threshold_over_8k.fraction() for row in table]
    assert all(a > b for a, b in zip(ratios, ratios[1:]))
    assert all(row.report.simple_threshold.fraction() <= row.report.threshold.fraction() for row in table)


def test_formatted_tables_have_one_line_per_row(rows):
    assert len(format_runtime_table(rows[:5]).splitlines()) == 7
    assert len(format_threshold_table(corollary_threshold_table(5)).splitlines()) == 7
