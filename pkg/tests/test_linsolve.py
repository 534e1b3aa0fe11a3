import random

import pytest
import sympy as sp
from gmpy2 import mpq

from reviham.errors import InconsistentSystem
from reviham.linsolve import rank, solve_sparse


def _dense(rows, ncols):
    return sp.Matrix([[sp.Rational(int(r.get(c, 0).numerator), int(r.get(c, 0).denominator)) if c in r else 0
                       for c in range(ncols)] for r in rows])


def _random_system(rng, m, n, density=0.5):
    rows = []
    for _ in range(m):
        rows.append({c: mpq(rng.randint(-5, 5), rng.randint(1, 4)) for c in range(n) if rng.random() < density})
    return rows


@pytest.mark.parametrize("seed", range(15))
def test_solution_satisfies_system(seed):
    rng = random.Random(seed)
    m, n = rng.randint(2, 7), rng.randint(2, 9)
    rows = _random_system(rng, m, n)
    x = [mpq(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(n)]
    rhs = [sum((c * x[j] for j, c in r.items()), mpq(0)) for r in rows]
    sol = solve_sparse(rows, rhs, n)
    for r, b in zip(rows, rhs):
        assert sum((c * sol[j] for j, c in r.items()), mpq(0)) == b
    assert rank(rows) == _dense(rows, n).rank()


@pytest.mark.parametrize("seed", range(10))
def test_free_unknowns_are_zero_and_pivots_leftmost(seed):
    rng = random.Random(100 + seed)
    m, n = 4, 7
    rows = _random_system(rng, m, n, 0.7)
    x = [mpq(rng.randint(-3, 3)) for _ in range(n)]
    rhs = [sum((c * x[j] for j, c in r.items()), mpq(0)) for r in rows]
    sol = solve_sparse(rows, rhs, n)
    M = _dense(rows, n)
    _, pivots = M.rref()
    for j in range(n):
        if j not in pivots:
            assert sol[j] == 0


def test_inconsistent_reports_row():
    rows = [{0: mpq(1), 1: mpq(1)}, {0: mpq(2), 1: mpq(2)}]
    with pytest.raises(InconsistentSystem) as exc:
        solve_sparse(rows, [mpq(1), mpq(3)], 2)
    assert exc.value.row == 1


def test_length_mismatch():
    with pytest.raises(ValueError):
        solve_sparse([{0: mpq(1)}], [mpq(1), mpq(2)], 1)
