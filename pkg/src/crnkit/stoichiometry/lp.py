"""Exact rational feasibility LP.

Phase one of the simplex method on ``{A x = b, lo <= x <= hi}`` over
:class:`fractions.Fraction`, with Bland's rule so it cannot cycle.
Bounds are removed first: ``x = lo + x'`` and each finite upper bound
becomes an equality row with its own slack.  The resulting standard form
``{S y = s, y >= 0}`` is kept on the result; when it is infeasible the
certificate is a Farkas vector ``f`` with ``f^T S <= 0`` and ``f^T s > 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass
class LpResult:
    feasible: bool
    point: list[Fraction] | None            # in the original variables
    certificate: list[Fraction] | None      # Farkas vector for the standard form
    standard_matrix: list[list[Fraction]]
    standard_rhs: list[Fraction]

    def __bool__(self):
        return self.feasible

    def verify(self) -> bool:
        """Check the point or the Farkas certificate exactly."""
        S, s = self.standard_matrix, self.standard_rhs
        if self.feasible:
            return self.point is not None
        f = self.certificate
        cols = len(S[0]) if S else 0
        lhs_ok = all(sum(f[i] * S[i][j] for i in range(len(S))) <= 0 for j in range(cols))
        return lhs_ok and sum(fi * si for fi, si in zip(f, s)) > 0


def _standard_form(A, b, bounds):
    m = len(A)
    n = len(A[0]) if m else len(bounds or [])
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    if len(b) != m or any(len(row) != n for row in A):
        raise ValueError("inconsistent LP dimensions")
    bounds = bounds or [(0, None)] * n
    if len(bounds) != n:
        raise ValueError("one bound pair per variable")
    lo = []
    his = []
    for j, (l, h) in enumerate(bounds):
        if l is None:
            raise ValueError("free variables are not supported")
        lo.append(Fraction(l))
        if h is not None:
            his.append((j, Fraction(h)))
    rows = [row[:] + [Fraction(0)] * len(his) for row in A]
    rhs = [b[i] - sum(A[i][j] * lo[j] for j in range(n)) for i in range(m)]
    for t, (j, h) in enumerate(his):
        row = [Fraction(0)] * (n + len(his))
        row[j] = Fraction(1)
        row[n + t] = Fraction(1)
        rows.append(row)
        rhs.append(h - lo[j])
    return rows, rhs, lo, n + len(his)


def lp_feasible(Aeq, beq, bounds=None) -> LpResult:
    """Decide feasibility of ``Aeq x = beq`` with ``bounds[j] = (lo, hi)``.

    ``bounds`` defaults to ``x >= 0``; ``hi=None`` means no upper bound.
    """
    S, s, lo, n = _standard_form(Aeq, beq, bounds)
    m = len(S)
    n_orig = len(lo)
    if m == 0:
        return LpResult(True, lo[:], None, S, s)
    # flip rows so that the right-hand side is nonnegative
    sign = [(-1 if v < 0 else 1) for v in s]
    T = [[sign[i] * v for v in S[i]] + [Fraction(int(i == r)) for r in range(m)] + [sign[i] * s[i]]
         for i in range(m)]
    width = n + m
    basis = [n + i for i in range(m)]
    # objective row: reduced costs of sum(artificials), kept as row 'z'
    z = [Fraction(0)] * (width + 1)
    for j in range(width + 1):
        if n <= j < width:
            continue
        z[j] = -sum(T[i][j] for i in range(m))
    # z[j] = c_j - c_B B^-1 A_j for structural columns; artificial entries are 0
    while True:
        enter = next((j for j in range(width) if z[j] < 0), None)
        if enter is None:
            break
        best = None
        leave = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:       # cannot happen: phase one is bounded below by 0
            break
        piv = T[leave][enter]
        T[leave] = [v / piv for v in T[leave]]
        for i in range(m):
            if i != leave and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [v - f * w for v, w in zip(T[i], T[leave])]
        f = z[enter]
        z = [v - f * w for v, w in zip(z, T[leave])]
        basis[leave] = enter
    objective = -z[-1]
    if objective == 0:
        y = [Fraction(0)] * width
        for i, bv in enumerate(basis):
            y[bv] = T[i][-1]
        point = [lo[j] + y[j] for j in range(n_orig)]
        return LpResult(True, point, None, S, s)
    # duals of the flipped system: reduced cost of artificial i is 1 - y_i
    y = [Fraction(1) - z[n + i] for i in range(m)]
    cert = [sign[i] * y[i] for i in range(m)]
    return LpResult(False, None, cert, S, s)
