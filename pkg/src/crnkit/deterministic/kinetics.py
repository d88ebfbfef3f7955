"""Mass-action right-hand side and its analytic Jacobian."""

from __future__ import annotations

import numpy as np
from scipy import sparse

from ..errors import NegativeConcentrationError
from ..network import ReactionNetwork, as_rates

NEGATIVE_TOL = 1e-12


class MassAction:
    """Precomputed mass-action kinetics ``dc/dt = gamma @ (k * c**alpha)``.

    Reactant monomials are stored as padded index/exponent tables so that
    all step rates come out of one vectorised product; padding points at
    an extra slot that always holds 1.0.  ``0**0`` evaluates to 1, so the
    empty complex gives a constant (zeroth-order) rate.
    """

    def __init__(self, net: ReactionNetwork, k):
        self.net = net
        self.k = as_rates(net, k)
        m, r = net.n_species, net.n_steps
        terms = [[(i, int(net.alpha[i, j])) for i in np.flatnonzero(net.alpha[:, j])] for j in range(r)]
        width = max(1, max(len(t) for t in terms))
        self._idx = np.full((r, width), m, dtype=np.intp)
        self._exp = np.zeros((r, width), dtype=np.int64)
        for j, t in enumerate(terms):
            for s, (i, a) in enumerate(t):
                self._idx[j, s] = i
                self._exp[j, s] = a
        self._gamma = sparse.csr_matrix(net.gamma.astype(float))
        self._rows = np.repeat(np.arange(r), width)
        self._buf = np.ones(m + 1)

    @property
    def n_species(self) -> int:
        return self.net.n_species

    def _extended(self, c) -> np.ndarray:
        buf = self._buf.copy()
        buf[:-1] = c
        return buf

    def rates(self, c) -> np.ndarray:
        ce = self._extended(c)
        return self.k * np.prod(ce[self._idx] ** self._exp, axis=1)

    def rhs(self, c) -> np.ndarray:
        return self._gamma @ self.rates(c)

    def rate_jacobian(self, c) -> sparse.csr_matrix:
        """d(rates)/dc as a sparse R x M matrix."""
        ce = self._extended(c)
        powers = ce[self._idx] ** self._exp
        r, width = self._idx.shape
        vals = np.empty((r, width))
        for s in range(width):
            others = np.prod(np.delete(powers, s, axis=1), axis=1) if width > 1 else np.ones(r)
            a = self._exp[:, s]
            dpow = np.where(a > 0, a * ce[self._idx[:, s]] ** np.maximum(a - 1, 0), 0.0)
            vals[:, s] = self.k * dpow * others
        cols = self._idx.ravel()
        keep = cols < self.n_species
        return sparse.csr_matrix((vals.ravel()[keep], (self._rows[keep], cols[keep])),
                                 shape=(r, self.n_species))

    def jacobian_sparse(self, c) -> sparse.csr_matrix:
        return (self._gamma @ self.rate_jacobian(c)).tocsr()

    def jacobian(self, c) -> np.ndarray:
        return self.jacobian_sparse(c).toarray()


def _check(c) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if np.any(c < -NEGATIVE_TOL):
        bad = int(np.argmin(c))
        raise NegativeConcentrationError(f"concentration {bad} is negative ({c[bad]!r})")
    return c


def rhs(net: ReactionNetwork, k, c) -> np.ndarray:
    """Induced kinetic right-hand side at ``c``."""
    return MassAction(net, k).rhs(_check(c))


def jacobian(net: ReactionNetwork, k, c) -> np.ndarray:
    """Dense analytic Jacobian of :func:`rhs`."""
    return MassAction(net, k).jacobian(_check(c))
