from __future__ import annotations

import random

import pytest

from fairshare import Rat
from fairshare.lp import simplex_max


def test_tiny_box():
    obj, x, duals = simplex_max([Rat(1), Rat(1)], [[Rat(1), Rat(0)], [Rat(0), Rat(1)]], [Rat(1), Rat(2)])
    assert obj == 3
    assert x == [Rat(1), Rat(2)]
    assert duals == [Rat(1), Rat(1)]


def test_textbook_two_variable_program():
    # max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18
    c = [Rat(3), Rat(5)]
    rows = [[Rat(1), Rat(0)], [Rat(0), Rat(2)], [Rat(3), Rat(2)]]
    rhs = [Rat(4), Rat(12), Rat(18)]
    obj, x, duals = simplex_max(c, rows, rhs)
    assert obj == 36
    assert x == [Rat(2), Rat(6)]
    assert duals == [Rat(0), Rat(3, 2), Rat(1)]


def test_fractional_optimum():
    # max x + y st 2x + y <= 3, x + 2y <= 3; symmetric optimum at (1, 1)
    obj, x, duals = simplex_max(
        [Rat(1), Rat(1)], [[Rat(2), Rat(1)], [Rat(1), Rat(2)]], [Rat(3), Rat(3)]
    )
    assert obj == 2
    assert x == [Rat(1), Rat(1)]
    assert duals == [Rat(1, 3), Rat(1, 3)]


def test_zero_rhs_is_feasible():
    obj, x, _ = simplex_max([Rat(1)], [[Rat(1)]], [Rat(0)])
    assert obj == 0
    assert x == [Rat(0)]


def test_unbounded_raises():
    with pytest.raises(ValueError):
        simplex_max([Rat(1)], [[Rat(0)]], [Rat(1)])
    with pytest.raises(ValueError):
        simplex_max([Rat(1), Rat(1)], [[Rat(1), Rat(-1)]], [Rat(2)])


def test_random_programs_carry_optimality_certificates():
    """Primal feasibility, dual feasibility, and matching objectives pin the
    returned point as optimal, so no reference solver is needed."""
    rng = random.Random(23)
    for _ in range(60):
        nvar = rng.randint(1, 4)
        ncon = rng.randint(1, 4)
        c = [Rat(rng.randint(0, 6)) for _ in range(nvar)]
        rows = [[Rat(rng.randint(0, 5)) for _ in range(nvar)] for _ in range(ncon)]
        rhs = [Rat(rng.randint(0, 10)) for _ in range(ncon)]
        # a simplex row keeps every variable bounded
        rows.append([Rat(1)] * nvar)
        rhs.append(Rat(10))
        obj, x, duals = simplex_max(c, rows, rhs)
        assert all(xi >= 0 for xi in x)
        for row, limit in zip(rows, rhs):
            assert sum(a * xi for a, xi in zip(row, x)) <= limit
        assert all(y >= 0 for y in duals)
        for j in range(nvar):
            assert c[j] <= sum(duals[i] * rows[i][j] for i in range(len(rows)))
        assert obj == sum(ci * xi for ci, xi in zip(c, x))
        assert obj == sum(y * limit for y, limit in zip(duals, rhs))
