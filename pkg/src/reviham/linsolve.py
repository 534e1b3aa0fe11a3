"""Exact Gauss-Jordan elimination over the rationals.

Rows are sparse dicts ``column -> coefficient``.  Pivots are chosen on the
leftmost available column, so callers express a preference for which
unknowns absorb the solution by ordering the columns; every free column is
set to zero.
"""

from __future__ import annotations

from typing import Sequence

from gmpy2 import mpq

from .errors import InconsistentSystem


def solve_sparse(rows: Sequence[dict[int, mpq]], rhs: Sequence, ncols: int) -> list[mpq]:
    """Solve ``rows · u = rhs`` exactly.

    Returns the solution whose free unknowns are zero, pivoting on the
    lowest-index column first.  Raises :class:`InconsistentSystem` if some
    equation reduces to ``0 = c`` with ``c != 0``.
    """
    work = [({c: mpq(v) for c, v in row.items() if v}, mpq(b)) for row, b in zip(rows, rhs)]
    if len(work) != len(rows) or len(rhs) != len(rows):
        raise ValueError("rows and right-hand side differ in length")
    pivots: dict[int, tuple[dict[int, mpq], mpq]] = {}
    for idx, (row, b) in enumerate(work):
        row = dict(row)
        # reduce against existing pivots
        for col in sorted(c for c in row if c in pivots):
            if col not in row:
                continue
            factor = row[col]
            prow, pb = pivots[col]
            for c, v in prow.items():
                nv = row.get(c, 0) - factor * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
            b = b - factor * pb
        if not row:
            if b:
                raise InconsistentSystem(f"equation {idx} reduces to 0 = {b}", row=idx)
            continue
        col = min(row)
        inv = 1 / row[col]
        row = {c: v * inv for c, v in row.items()}
        b = b * inv
        # eliminate the new pivot column from earlier pivot rows
        for pc, (prow, pb) in list(pivots.items()):
            factor = prow.get(col)
            if not factor:
                continue
            for c, v in row.items():
                nv = prow.get(c, 0) - factor * v
                if nv:
                    prow[c] = nv
                else:
                    prow.pop(c, None)
            pivots[pc] = (prow, pb - factor * b)
        pivots[col] = (row, b)
    # free columns are zero, so each pivot unknown is its reduced rhs
    solution = [mpq(0)] * ncols
    for col, (_, b) in pivots.items():
        solution[col] = b
    return solution


def rank(rows: Sequence[dict[int, mpq]]) -> int:
    """Rank of a sparse matrix."""
    return _count_pivots(rows)


def _count_pivots(rows) -> int:
    pivots: dict[int, dict[int, mpq]] = {}
    for row in rows:
        row = {c: mpq(v) for c, v in row.items() if v}
        for col in sorted(c for c in row if c in pivots):
            if col not in row:
                continue
            factor = row[col]
            for c, v in pivots[col].items():
                nv = row.get(c, 0) - factor * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
        if not row:
            continue
        col = min(row)
        inv = 1 / row[col]
        row = {c: v * inv for c, v in row.items()}
        for pc, prow in pivots.items():
            factor = prow.get(col)
            if factor:
                for c, v in row.items():
                    nv = prow.get(c, 0) - factor * v
                    if nv:
                        prow[c] = nv
                    else:
                        prow.pop(c, None)
        pivots[col] = row
    return len(pivots)
