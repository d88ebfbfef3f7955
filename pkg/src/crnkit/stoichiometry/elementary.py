"""Generation of every atom- and charge-balanced elementary step.

An elementary step has a reactant complex of total molecularity one or
two.  For each such complex ``alpha`` the products are the nonnegative
integer solutions ``x`` of ``A x = A alpha``; the step ``alpha -> x`` is
kept whenever ``x != alpha``.  A step and its reverse count as two steps,
and products are not restricted in molecularity.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ..errors import UnboundedEnumerationError
from ..network import Complex, ReactionStep
from .formula import AtomicMatrix


@dataclass(frozen=True)
class ReactantComplex:
    """Species indices with multiplicity, e.g. ``(0, 0)`` is ``2 X1``."""

    indices: tuple[int, ...]

    @property
    def molecularity(self) -> int:
        return len(self.indices)

    def vector(self, m: int) -> np.ndarray:
        v = np.zeros(m, dtype=np.int64)
        for i in self.indices:
            v[i] += 1
        return v

    def as_complex(self, names) -> Complex:
        out: dict[str, int] = {}
        for i in self.indices:
            out[names[i]] = out.get(names[i], 0) + 1
        return Complex.from_mapping(out)


def reactant_complexes(m: int) -> list[ReactantComplex]:
    """All complexes of total molecularity one or two over ``m`` species.

    Order: ``X1, 2X1, X2, 2X2, ...`` followed by the mixed pairs
    ``Xi + Xj`` (i < j) in lexicographic order.
    """
    if m < 1:
        raise ValueError("need at least one species")
    out: list[ReactantComplex] = []
    for i in range(m):
        out.append(ReactantComplex((i,)))
        out.append(ReactantComplex((i, i)))
    out.extend(ReactantComplex(p) for p in combinations(range(m), 2))
    return out


def balanced_products(am: AtomicMatrix, target, max_molecularity: int | None = None) -> list[tuple[int, ...]]:
    """Nonnegative integer ``x`` with ``A x = target`` by bounded depth-first search.

    Species are visited in column order.  A species containing some element
    is bounded by the remaining amount of that element; an element-free
    species (the electron) can only be bounded by ``max_molecularity``.
    """
    mat = am.matrix
    n_el = len(am.elements)
    elem = mat[:n_el]
    charge = mat[-1]
    m = am.n_species
    target = np.asarray(target, dtype=np.int64)
    free = [j for j in range(m) if not elem[:, j].any()]
    if free and max_molecularity is None:
        raise UnboundedEnumerationError(
            "species without elements (" + ", ".join(am.species[j] for j in free)
            + ") need a product molecularity cap")
    cap = max_molecularity
    cols = [[(e, int(elem[e, j])) for e in range(n_el) if elem[e, j]] for j in range(m)]
    ch = [int(c) for c in charge]
    out: list[tuple[int, ...]] = []
    x = [0] * m
    rem = [int(v) for v in target[:n_el]]

    def rec(j, charge_left, used):
        if j == m:
            if charge_left == 0 and not any(rem):
                out.append(tuple(x))
            return
        if cols[j]:
            ub = min(rem[e] // a for e, a in cols[j])
        else:
            ub = cap - used
        if cap is not None:
            ub = min(ub, cap - used)
        for v in range(ub + 1):
            x[j] = v
            for e, a in cols[j]:
                rem[e] -= v * a
            rec(j + 1, charge_left - v * ch[j], used + v)
            for e, a in cols[j]:
                rem[e] += v * a
        x[j] = 0

    rec(0, int(target[-1]), 0)
    return out


def elementary_reactions(am: AtomicMatrix, *, max_product_molecularity: int | None = None,
                         allow_shared_species: bool = True) -> list[ReactionStep]:
    """Every balanced elementary step among the species of ``am``.

    Args:
        am: Atomic matrix; its species labels become species names.
        max_product_molecularity: Optional cap on the product molecularity.
            Required when a species carries no element.
        allow_shared_species: When false, steps in which a species appears
            on both sides (spectators, catalysts) are dropped.

    Returns:
        Steps ordered by reactant complex (see :func:`reactant_complexes`)
        and then by the depth-first order of product solutions.
    """
    m = am.n_species
    names = am.species
    seen: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()
    steps = []
    for rc in reactant_complexes(m):
        alpha = rc.vector(m)
        target = am.matrix @ alpha
        for x in balanced_products(am, target, max_product_molecularity):
            a = tuple(int(v) for v in alpha)
            if x == a:
                continue
            if not allow_shared_species and any(p and q for p, q in zip(a, x)):
                continue
            if (a, x) in seen:
                continue
            seen.add((a, x))
            reactant = Complex.from_mapping({names[i]: c for i, c in enumerate(a) if c})
            product = Complex.from_mapping({names[i]: c for i, c in enumerate(x) if c})
            steps.append(ReactionStep(reactant, product))
    return steps
