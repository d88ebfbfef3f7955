import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crnkit import load_builtin, parse_network, structure_report
from crnkit.deterministic import rhs
from crnkit.detailed_balance import (MonomialEquation, balanced_rates, check_detailed_balance,
                                     circuit_conditions, forest_conditions, spanning_forest)
from crnkit.errors import NonpositiveRateError, NotReversibleError
from crnkit.repro import _random_reversible_network

TRIANGLE = "A <-> B, B <-> C, C <-> A"


def test_wegscheider_single_forest_condition():
    net = load_builtin("wegscheider").network
    forest = spanning_forest(net)
    assert len(forest.edges) == 2 and forest.non_forest_pairs == ()
    assert circuit_conditions(net) == []
    (eq,) = forest_conditions(net)
    assert eq.text() == "k[2]*k[3] == k[1]*k[4]"
    assert eq.exponents() == {0: 1, 3: 1, 1: -1, 2: -1}


def test_triangle_circuit():
    net = parse_network(TRIANGLE)
    forest = spanning_forest(net)
    assert len(forest.edges) == 2 and len(forest.non_forest_pairs) == 1
    (eq,) = circuit_conditions(net)
    # k1 k2 k3 = k-1 k-2 k-3 (steps 0, 2, 4 forward; 1, 3, 5 backward)
    assert eq.exponents() in ({0: 1, 2: 1, 4: 1, 1: -1, 3: -1, 5: -1},
                              {0: -1, 2: -1, 4: -1, 1: 1, 3: 1, 5: 1})
    assert forest_conditions(net) == []


def test_chain3_and_single_pair_have_no_conditions():
    for text in ("X1 <-> X2, X2 <-> X3", "A <-> B"):
        net = parse_network(text)
        assert circuit_conditions(net) == [] and forest_conditions(net) == []
    assert len(spanning_forest(parse_network("A <-> B")).edges) == 1


def test_check_values():
    net = load_builtin("wegscheider").network
    assert check_detailed_balance(net, [1, 2, 3, 6]).holds
    rep = check_detailed_balance(net, [1, 1, 1, 2])
    assert not rep.holds
    assert rep.residuals == [pytest.approx(math.log(2))]


def test_errors():
    with pytest.raises(NotReversibleError):
        spanning_forest(load_builtin("r1").network)
    with pytest.raises(NonpositiveRateError):
        check_detailed_balance(load_builtin("wegscheider").network, [1, 0, 1, 1])


def test_point_check():
    net = parse_network(TRIANGLE)
    c = np.array([1.0, 2.0, 0.5])
    k = balanced_rates(net, [1, 0, 3, 0, 2, 0], c)
    rep = check_detailed_balance(net, k, c_star=c)
    assert rep.holds and max(rep.point_residuals) < 1e-12
    assert not check_detailed_balance(net, k, c_star=[1.0, 1.0, 1.0]).holds


def test_monomial_equation_validation():
    with pytest.raises(ValueError):
        MonomialEquation(((0, 1),), ((0, 1),))
    with pytest.raises(ValueError):
        MonomialEquation(((0, 0),), ((1, 1),))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_condition_counts_and_soundness(seed):
    rng = np.random.default_rng(seed)
    net = _random_reversible_network(rng)
    rep = structure_report(net)
    assert len(circuit_conditions(net)) == rep.P - rep.N + rep.L
    assert len(forest_conditions(net)) == rep.deficiency
    c = rng.uniform(0.2, 5.0, size=net.n_species)
    k = balanced_rates(net, rng.uniform(0.1, 10.0, size=net.n_steps), c)
    assert check_detailed_balance(net, k).holds
    scale = np.max(k * np.prod(c[:, None] ** net.alpha, axis=0))
    assert np.max(np.abs(rhs(net, k, c))) <= 1e-12 * scale


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_verdict_independent_of_forest(seed):
    rng = np.random.default_rng(seed)
    net = _random_reversible_network(rng)
    n = len(net.complexes)
    k = rng.uniform(0.5, 2.0, size=net.n_steps)
    if rng.random() < 0.5:
        k = balanced_rates(net, k, rng.uniform(0.2, 5.0, size=net.n_species))
    other = spanning_forest(net, root_order=list(rng.permutation(n)))
    assert check_detailed_balance(net, k).holds == check_detailed_balance(net, k, forest=other).holds
