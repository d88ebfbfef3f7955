"""Exact rational linear algebra on sparse rows.

Rows are dicts mapping column index to :class:`fractions.Fraction`.  Mass
action networks give very sparse integer matrices, so elimination on
dict rows stays cheap even for thousand-species chains, and nothing here
ever touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

import numpy as np

SparseRow = dict


def _sparse_rows(matrix) -> list[SparseRow]:
    if isinstance(matrix, np.ndarray):
        if matrix.dtype.kind not in "iub":
            raise TypeError("exact elimination needs an integer array")
        return [{int(j): Fraction(int(row[j])) for j in np.flatnonzero(row)} for row in matrix]
    rows = []
    for row in matrix:
        rows.append({j: Fraction(int(v)) if not isinstance(v, Fraction) else v
                     for j, v in enumerate(row) if v != 0})
    return rows


def rref(matrix, ncols: int | None = None, reduced: bool = True):
    """Reduced row echelon form.

    Returns ``(rows, pivots, pivot_rows)``: the nonzero reduced rows, their
    pivot columns (increasing), and for each pivot the index of the input
    row that supplied it.  Pivot rows are chosen as the first remaining
    input row with a nonzero entry in the pivot column, so ``pivot_rows``
    names a maximal independent subset of the input rows.  With
    ``reduced=False`` only rows below each pivot are cleared (plain echelon
    form), which is all a rank computation needs.
    """
    if isinstance(matrix, list) and matrix and isinstance(matrix[0], dict):
        rows = [dict(r) for r in matrix]
    else:
        rows = _sparse_rows(matrix)
    if ncols is None:
        ncols = 1 + max((max(r) for r in rows if r), default=-1)
    # column -> set of row slots with a nonzero there; keeps pivot search sparse
    by_col: dict[int, set[int]] = {}
    for i, r in enumerate(rows):
        for j in r:
            by_col.setdefault(j, set()).add(i)
    done: list[int] = []
    pivots: list[int] = []
    used = set()
    for col in range(ncols):
        cands = [i for i in by_col.get(col, ()) if i not in used]
        if not cands:
            continue
        p = min(cands)
        used.add(p)
        prow = rows[p]
        inv = 1 / prow[col]
        for j in prow:
            prow[j] *= inv
        for i in list(by_col.get(col, ())):
            if i == p or (not reduced and i in used):
                continue
            row = rows[i]
            f = row[col]
            for j, v in prow.items():
                nv = row.get(j, 0) - f * v
                if nv:
                    if j not in row:
                        by_col.setdefault(j, set()).add(i)
                    row[j] = nv
                else:
                    if j in row:
                        del row[j]
                        by_col[j].discard(i)
        done.append(p)
        pivots.append(col)
    return [rows[p] for p in done], pivots, done


def rank(matrix) -> int:
    return len(rref(matrix, reduced=False)[1])


def transpose(matrix):
    if isinstance(matrix, np.ndarray):
        return matrix.T
    return [list(col) for col in zip(*matrix)] if len(matrix) else []


def nullspace(matrix, ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of the right null space, one vector per free column.

    The vector for free column ``f`` has a 1 in position ``f`` and zeros
    in the other free positions (the reduced-echelon basis); it is found
    by back substitution through the echelon rows.
    """
    if ncols is None:
        ncols = len(matrix[0]) if len(matrix) else 0
    rows, pivots, _ = rref(matrix, ncols, reduced=False)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v: dict[int, Fraction] = {f: Fraction(1)}
        for r, p in zip(reversed(rows), reversed(pivots)):
            acc = sum((c * v[j] for j, c in r.items() if j != p and j in v), Fraction(0))
            if acc:
                v[p] = -acc / r[p]
        basis.append([v.get(j, Fraction(0)) for j in range(ncols)])
    return basis


def left_nullspace(matrix) -> list[list[Fraction]]:
    """Basis of ``{w : w @ matrix = 0}``."""
    m = len(matrix)
    return nullspace(transpose(matrix), m) if m else []


def independent_rows(matrix) -> list[int]:
    """Indices of a maximal linearly independent set of rows (pivot rows)."""
    if not len(matrix):
        return []
    # pivot columns of the transpose are independent rows of the original
    return rref(transpose(matrix), len(matrix), reduced=False)[1]


def primitive(vec: Sequence[Fraction], sign: str = "first") -> list[int]:
    """Scale a rational vector to coprime integers.

    ``sign="first"`` makes the first nonzero entry positive.
    """
    den = 1
    for v in vec:
        den = lcm(den, Fraction(v).denominator)
    ints = [int(Fraction(v) * den) for v in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return ints
    ints = [x // g for x in ints]
    if sign == "first":
        lead = next(x for x in ints if x)
        if lead < 0:
            ints = [-x for x in ints]
    return ints


def matvec(matrix, vec: Iterable) -> list:
    vec = list(vec)
    return [sum(a * b for a, b in zip(row, vec)) for row in matrix]
