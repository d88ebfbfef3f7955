from importlib.resources import files

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crnkit.errors import UnboundedEnumerationError
from crnkit.network import Complex
from crnkit.repro import OPS_STEP_COUNT, _brute_force_products
from crnkit.stoichiometry import (atomic_matrix, balanced_products, elementary_reactions, reactant_complexes,
                                  read_formula_file)
from crnkit.stoichiometry.formula import AtomicMatrix


def ops_matrix():
    text = files("crnkit").joinpath("data/ops16.formulas").read_text(encoding="utf-8")
    return atomic_matrix(read_formula_file(text))


def step_vectors(am, step):
    idx = {s: i for i, s in enumerate(am.species)}
    out = []
    for cplx in (step.reactant, step.product):
        v = np.zeros(am.n_species, dtype=np.int64)
        for name, c in cplx.as_dict().items():
            v[idx[name]] += c
        out.append(v)
    return out


@pytest.mark.parametrize("m, n", [(1, 2), (3, 9), (16, 152)])
def test_reactant_complex_counts(m, n):
    assert len(reactant_complexes(m)) == n


@given(st.integers(1, 30))
def test_reactant_complex_formula(m):
    rcs = reactant_complexes(m)
    assert len(rcs) == 2 * m + m * (m - 1) // 2
    assert len(set(rcs)) == len(rcs)
    assert all(1 <= rc.molecularity <= 2 for rc in rcs)


def test_reactant_complexes_need_species():
    with pytest.raises(ValueError):
        reactant_complexes(0)


def test_water_decomposition_step():
    am = atomic_matrix(["H2", "O2", "H2O"])
    steps = [s for s in elementary_reactions(am) if s.reactant == Complex.from_mapping({"H2O": 2})]
    assert len(steps) == 1
    assert steps[0].product == Complex.from_mapping({"H2": 2, "O2": 1})


def test_single_species_has_no_steps():
    assert elementary_reactions(atomic_matrix(["H2"])) == []


def test_water_system_matches_brute_force():
    am = atomic_matrix(["H2", "O2", "H2O"])
    for rc in reactant_complexes(3):
        alpha = rc.vector(3)
        target = am.matrix @ alpha
        assert sorted(balanced_products(am, target)) == sorted(_brute_force_products(am.matrix, target))


def test_ops_steps_are_balanced():
    am = ops_matrix()
    steps = elementary_reactions(am)
    assert len(steps) == OPS_STEP_COUNT
    assert len({(s.reactant, s.product) for s in steps}) == len(steps)
    for step in steps:
        a, b = step_vectors(am, step)
        assert not np.array_equal(a, b)
        assert a.sum() <= 2
        assert np.array_equal(am.matrix @ a, am.matrix @ b)


def test_ops_without_shared_species():
    steps = elementary_reactions(ops_matrix(), allow_shared_species=False)
    assert len(steps) == 82
    for step in steps:
        assert not set(step.reactant.as_dict()) & set(step.product.as_dict())


def test_electron_needs_cap():
    am = atomic_matrix(["Fe^3+", "Fe^2+", "e^-"])
    with pytest.raises(UnboundedEnumerationError):
        elementary_reactions(am)
    steps = elementary_reactions(am, max_product_molecularity=2)
    reduced = Complex.from_mapping({"Fe^3+": 1, "e^-": 1})
    ferrous = Complex.from_mapping({"Fe^2+": 1})
    assert {(s.reactant, s.product) for s in steps} == {(reduced, ferrous), (ferrous, reduced)}


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(0, 2), min_size=3, max_size=3), min_size=1, max_size=2)
       .filter(lambda rows: all(any(r[j] for r in rows) for j in range(3))))
def test_products_match_brute_force(rows):
    mat = np.array(rows + [[0, 0, 0]], dtype=np.int64)
    labels = ("H", "O")[:len(rows)] + ("charge",)
    am = AtomicMatrix(labels, ("X1", "X2", "X3"), mat)
    for rc in reactant_complexes(3):
        target = mat @ rc.vector(3)
        assert sorted(balanced_products(am, target)) == sorted(_brute_force_products(mat, target, cap=int(target[:-1].sum())))
