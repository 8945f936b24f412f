import inspect
import math

import pytest
from hypothesis import given, strategies as st

from arealstats import theory
from arealstats.theory import divergence_table, lattice_count_closed, lattice_count_oracle, lattice_count_sq


def _sums_of_two_squares(limit):
    return {x * x + y * y for x in range(int(math.isqrt(limit)) + 1) for y in range(int(math.isqrt(limit)) + 1) if x * x + y * y <= limit}


@pytest.mark.parametrize("t, n", [(0, 1), (1, 5), (2, 13), (3, 29)])
def test_closed_form_values(t, n):
    assert lattice_count_closed(t) == n
    assert lattice_count_oracle(t) == n


def test_hand_enumeration():
    # origin, four axis points, four diagonal points
    assert lattice_count_oracle(math.sqrt(2)) == 9
    assert lattice_count_closed(math.sqrt(2)) == 9


def test_non_integral_radius():
    assert lattice_count_closed(2.5) == lattice_count_oracle(2.5) == 21


@given(st.floats(0, 60, allow_nan=False))
def test_closed_matches_oracle_real_t(t):
    assert lattice_count_closed(t) == lattice_count_oracle(t)


def test_monotone_and_jumps():
    sums = _sums_of_two_squares(400)
    prev = lattice_count_sq(0)
    for m in range(1, 401):
        cur = lattice_count_sq(m)
        assert cur >= prev
        assert (cur > prev) == (m in sums)
        prev = cur


def test_row_at_three():
    row = [r for r in divergence_table(3, 0.5) if r.t == 3.0][0]
    assert row.n_of_t == 29
    assert row.error == pytest.approx(29 - 9 * math.pi, abs=1e-12)
    assert row.error == pytest.approx(0.726, abs=1e-3)


def test_rows_and_symmetry():
    rows = divergence_table(10, 0.1)
    assert len(rows) == 100
    assert rows[29].t == pytest.approx(3.0)
    assert rows[29].n_of_t == 29
    assert all(r.n_of_t % 4 == 1 for r in rows)
    assert all(r.scaled_error == pytest.approx(abs(r.error) / math.sqrt(r.t)) for r in rows)


def test_error_changes_sign():
    rows = divergence_table(10, 0.01)
    assert any(r.error > 0 for r in rows) and any(r.error < 0 for r in rows)
    first_negative = next(r for r in rows if r.error < 0)
    assert lattice_count_oracle(first_negative.t) < math.pi * first_negative.t**2
    assert lattice_count_closed(1) - math.pi == pytest.approx(1.8584, abs=1e-4)


def test_no_observation_probability_parameter():
    # K on the infinite grid equals N(t) for every observation probability
    for fn in (lattice_count_closed, lattice_count_oracle, divergence_table, theory.lattice_row):
        assert "p" not in inspect.signature(fn).parameters


def test_exponent_constants_documented_only():
    assert theory.THETA_LOWER_EXCLUSIVE < theory.THETA_UPPER == theory.Fraction(131, 208)
