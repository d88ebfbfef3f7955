"""Stationary points inside a stoichiometric compatibility class.

The nonlinear system solved by Newton's method is square: the rhs
components belonging to a maximal independent set of rows of the
stoichiometric matrix, stacked with the conservation residuals
``W (c - c0)``.  Several deterministic starting points are tried and the
converged points are deduplicated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .. import linalg
from ..errors import NegativeConcentrationError, NoConvergenceError
from ..network import ReactionNetwork
from ..structure import conservation_matrix
from .kinetics import MassAction

DEDUP_TOL = 1e-8


@dataclass(frozen=True)
class StationaryPoint:
    c: np.ndarray
    residual: float          # max |rhs(c)|
    class_residual: float    # max |W (c - c0)|
    start: int = 0           # index of the start that produced it

    def is_positive(self, tol: float = 1e-10) -> bool:
        return bool(np.all(self.c > tol))


class _NewtonSystem:
    def __init__(self, net: ReactionNetwork, k, c0):
        self.kin = MassAction(net, k)
        self.rows = linalg.independent_rows(net.gamma)
        self.W = conservation_matrix(net).astype(float).reshape(-1, net.n_species)
        self.c0 = np.asarray(c0, dtype=float)
        self.target = self.W @ self.c0

    def residual(self, c):
        return np.concatenate([self.kin.rhs(c)[self.rows], self.W @ c - self.target])

    def jacobian(self, c):
        return np.vstack([self.kin.jacobian(c)[self.rows], self.W])


def _starts(c0: np.ndarray, n: int, seed: int) -> list[np.ndarray]:
    """``c0`` followed by ``n - 1`` Halton points spread around its scale."""
    starts = [c0.copy()]
    if n <= 1:
        return starts
    m = c0.size
    level = max(float(np.mean(c0)), 1e-3)
    pts = qmc.Halton(d=m, scramble=True, seed=seed).random(n - 1)
    for u in pts:
        # mix c0 with a positive interior sample; Newton enforces the class
        starts.append(0.5 * c0 + level * (0.05 + 1.95 * u))
    return starts


def _newton(system: _NewtonSystem, c, tol, max_iter):
    f = system.residual(c)
    fn = np.max(np.abs(f))
    for _ in range(max_iter):
        if fn <= tol:
            return c
        try:
            step = np.linalg.solve(system.jacobian(c), -f)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)):
            return None
        lam = 1.0
        while True:
            trial = c + lam * step
            ft = system.residual(trial)
            ftn = np.max(np.abs(ft))
            if np.isfinite(ftn) and ftn < fn:
                break
            lam *= 0.5
            if lam < 1e-10:
                return None
        c, f, fn = trial, ft, ftn
    return c if fn <= tol else None


def stationary_points(net: ReactionNetwork, k, c0, *, positivity: bool = False, starts: int = 16,
                      tol: float = 1e-10, max_iter: int = 64, seed: int = 0,
                      positivity_tol: float = 1e-10) -> list[StationaryPoint]:
    """Find stationary points of the mass-action system in the class of ``c0``.

    Args:
        net: The reaction network.
        k: Rate coefficients, one per step.
        c0: Reference concentrations defining the compatibility class.
        positivity: Keep only strictly positive points.
        starts: Number of Newton starts (``c0`` is always the first).
        tol: Max-norm tolerance on both the rhs and the class residual.
        max_iter: Newton iterations per start.
        seed: Seed for the scrambled Halton start points.

    Returns:
        Points ordered by the index of the start that first reached them.

    Raises:
        NoConvergenceError: No start converged to a nonnegative point.
    """
    c0 = np.asarray(c0, dtype=float)
    if c0.shape != (net.n_species,):
        raise ValueError(f"expected {net.n_species} reference concentrations")
    if np.any(c0 < 0):
        raise NegativeConcentrationError("reference concentrations must be nonnegative")
    system = _NewtonSystem(net, k, c0)
    found: list[StationaryPoint] = []
    converged = 0
    for idx, start in enumerate(_starts(c0, starts, seed)):
        c = _newton(system, start, tol, max_iter)
        if c is None or np.any(c < -tol):
            continue
        converged += 1
        c = np.maximum(c, 0.0)
        if any(np.max(np.abs(c - p.c)) < DEDUP_TOL for p in found):
            continue
        res = float(np.max(np.abs(system.kin.rhs(c))))
        cres = float(np.max(np.abs(system.W @ c - system.target), initial=0.0))
        found.append(StationaryPoint(c, res, cres, idx))
    if not converged:
        raise NoConvergenceError(f"Newton failed from all {starts} starts")
    if positivity:
        found = [p for p in found if p.is_positive(positivity_tol)]
    return found
