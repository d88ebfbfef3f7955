"""Decompositions of an overall reaction into elementary steps, and cycles.

A decomposition of ``w`` is a nonnegative integer ``x`` with
``gamma x = w``; a cycle is a nonzero nonnegative integer ``x`` with
``gamma x = 0``.  Minimal decompositions and minimal cycles come from the
Contejean-Devie completion procedure applied to the homogeneous system
``[gamma | -w] (x, z) = 0`` with ``z <= 1``: its minimal solutions with
``z = 1`` are the componentwise-minimal decompositions, those with
``z = 0`` the cycles that are not a sum of two cycles.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from ..errors import InfeasibleError, UnboundedEnumerationError
from .lp import lp_feasible


@dataclass(frozen=True)
class DecompositionSolution:
    multipliers: tuple[int, ...]
    is_cycle: bool = False

    def __iter__(self):
        return iter(self.multipliers)

    def __len__(self):
        return len(self.multipliers)


@dataclass
class DecompositionResult:
    solutions: list[DecompositionSolution]
    cycles: list[DecompositionSolution] = field(default_factory=list)
    truncated: bool = False

    def __iter__(self):
        return iter(self.solutions)

    def __len__(self):
        return len(self.solutions)

    def vectors(self) -> set[tuple[int, ...]]:
        return {s.multipliers for s in self.solutions}


def _as_int_matrix(gamma) -> np.ndarray:
    g = np.asarray(gamma)
    if g.ndim != 2:
        raise ValueError("gamma must be a matrix")
    if not np.all(np.equal(np.mod(g, 1), 0)):
        raise ValueError("gamma must be integer")
    return g.astype(np.int64)


def _dominates(v, others) -> bool:
    return any(all(a >= b for a, b in zip(v, o)) for o in others)


def _completion(mat: np.ndarray, z_index: int | None, max_solutions: int | None):
    """Contejean-Devie completion for ``mat @ v = 0``, ``v >= 0``.

    Starting from the unit vectors, a vector ``v`` with nonzero image is
    extended by ``e_j`` only when ``<A v, A e_j> < 0``, and vectors that
    dominate a solution already found are pruned; this reaches every
    minimal solution.  With ``z_index`` that coordinate is capped at 1.
    Solutions with ``v[z] = 0`` (cycles) are kept because they prune the
    search.  It stops once ``max_solutions`` solutions with ``v[z] = 1``
    exist; the returned flag reports truncation.
    """
    n = mat.shape[1]
    cols = [tuple(int(v) for v in mat[:, j]) for j in range(n)]
    minimal: list[tuple[int, ...]] = []
    n_targets = 0
    frontier = {tuple(int(i == j) for i in range(n)): cols[j] for j in range(n)}
    while frontier:
        pending = []
        for v, image in frontier.items():
            if any(image):
                pending.append((v, image))
            elif not _dominates(v, minimal):
                minimal.append(v)
                if z_index is not None and v[z_index] == 1:
                    n_targets += 1
                    if max_solutions is not None and n_targets >= max_solutions:
                        return minimal, True
        nxt: dict[tuple[int, ...], tuple[int, ...]] = {}
        for v, image in pending:
            for j in range(n):
                if j == z_index and v[j] >= 1:
                    continue
                col = cols[j]
                if sum(a * b for a, b in zip(image, col)) >= 0:
                    continue
                w = v[:j] + (v[j] + 1,) + v[j + 1:]
                if w in nxt or _dominates(w, minimal):
                    continue
                nxt[w] = tuple(a + b for a, b in zip(image, col))
        frontier = nxt
    return minimal, False


def cycles_exist(gamma) -> bool:
    """LP test for a nonnegative nonzero ``x`` with ``gamma x = 0``."""
    g = _as_int_matrix(gamma)
    m, r = g.shape
    if r == 0:
        return False
    rows = [list(map(int, g[i])) for i in range(m)] + [[1] * r]
    return lp_feasible(rows, [0] * m + [1]).feasible


@dataclass
class CycleReport:
    exists: bool
    minimal_cycles: list[tuple[int, ...]]


def cycles(gamma, *, enumerate_minimal: bool = True) -> CycleReport:
    """Cycle existence (exact LP) and the minimal cycles (Hilbert basis)."""
    g = _as_int_matrix(gamma)
    exists = cycles_exist(g)
    minimal: list[tuple[int, ...]] = []
    if exists and enumerate_minimal:
        minimal, _ = _completion(g, None, None)
    return CycleReport(exists, sorted(minimal, key=lambda v: (sum(v), v)))


def _base_feasibility(g: np.ndarray, w):
    m, r = g.shape
    rows = [list(map(int, g[i])) for i in range(m)]
    res = lp_feasible(rows, [int(v) for v in w])
    if not res.feasible:
        raise InfeasibleError("no nonnegative solution of gamma x = w exists", certificate=res.certificate)
    return rows


def decompositions(gamma, w, *, max_solutions: int | None = None, minimal_only: bool = True,
                   with_cycles: bool = False) -> DecompositionResult:
    """Minimal nonnegative integer solutions of ``gamma x = w``.

    Args:
        gamma: Integer stoichiometric matrix (species x steps).
        w: Integer vector of the overall reaction.
        max_solutions: Stop after this many decompositions; the result is
            then flagged ``truncated``.
        minimal_only: When false all decompositions are wanted, which is
            only possible when no cycle exists.
        with_cycles: Also enumerate the minimal cycles (can be costly).

    Raises:
        InfeasibleError: The LP relaxation has no solution; the exception
            carries the Farkas certificate.
        UnboundedEnumerationError: ``minimal_only`` is false but cycles
            exist, so there are infinitely many decompositions.
    """
    g = _as_int_matrix(gamma)
    w = np.asarray(w, dtype=np.int64)
    if w.shape != (g.shape[0],):
        raise ValueError("w must have one entry per species")
    if not minimal_only and cycles_exist(g):
        raise UnboundedEnumerationError("cycles exist, so the set of decompositions is infinite")
    r = g.shape[1]
    if not w.any():
        cyc = cycles(g).minimal_cycles if with_cycles else []
        return DecompositionResult([], [DecompositionSolution(c, True) for c in cyc], False)
    _base_feasibility(g, w)
    homog = np.hstack([g, -w.reshape(-1, 1)])
    minimal, truncated = _completion(homog, r, max_solutions)
    sols = sorted((v[:r] for v in minimal if v[r] == 1), key=lambda v: (sum(v), v))
    # minimal cycles come out of the same search unless it was cut short
    if with_cycles and not truncated:
        cyc = sorted((v[:r] for v in minimal if v[r] == 0), key=lambda v: (sum(v), v))
    else:
        cyc = cycles(g).minimal_cycles if with_cycles else []
    return DecompositionResult([DecompositionSolution(v) for v in sols],
                               [DecompositionSolution(c, True) for c in cyc], truncated)


@dataclass
class Preprocessing:
    forced_steps: list[int]
    excluded_steps: list[int]


def preprocess(gamma, w) -> Preprocessing:
    """Steps present in every (excluded from every) rational decomposition."""
    g = _as_int_matrix(gamma)
    w = [int(v) for v in w]
    rows = _base_feasibility(g, w)
    r = g.shape[1]
    forced, excluded = [], []
    for j in range(r):
        lo_one = [(0, None)] * r
        lo_one[j] = (1, None)
        if not lp_feasible(rows, w, lo_one).feasible:
            excluded.append(j)
            continue
        zero = [(0, None)] * r
        zero[j] = (0, 0)
        if not lp_feasible(rows, w, zero).feasible:
            forced.append(j)
    return Preprocessing(forced, excluded)


def heuristic_decompositions(gamma, w, *, samples: int = 100, max_depth: int = 50,
                             seed: int = 0) -> list[DecompositionSolution]:
    """Randomised greedy depth-first sampler of decompositions.

    Each sample starts from ``x = 0`` and repeatedly adds a random step
    that does not increase ``|w - gamma x|_1``, preferring steps that
    reduce it.  Solutions found are
    returned without duplicates, sorted; nothing is claimed about
    completeness or minimality.
    """
    g = _as_int_matrix(gamma)
    w = np.asarray(w, dtype=np.int64)
    rng = random.Random(seed)
    found: set[tuple[int, ...]] = set()
    r = g.shape[1]
    for _ in range(samples):
        x = [0] * r
        residual = w.copy()
        for _ in range(max_depth):
            if not residual.any():
                break
            norm = int(np.abs(residual).sum())
            after = [int(np.abs(residual - g[:, j]).sum()) for j in range(r)]
            options = [j for j in range(r) if after[j] < norm] or [j for j in range(r) if after[j] == norm]
            if not options:
                break
            j = rng.choice(options)
            x[j] += 1
            residual = residual - g[:, j]
        if not residual.any() and any(x):
            found.add(tuple(x))
    return [DecompositionSolution(v) for v in sorted(found, key=lambda v: (sum(v), v))]
