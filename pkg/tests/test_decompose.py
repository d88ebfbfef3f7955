import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crnkit import load_builtin
from crnkit.errors import InfeasibleError, UnboundedEnumerationError
from crnkit.repro import brute_force_solutions, cycles_exist_by_support, minimal_elements
from crnkit.stoichiometry import cycles, cycles_exist, decompositions, heuristic_decompositions, preprocess

# steps A -> B, B -> C, B -> A over species (A, B, C)
CHAIN = np.array([[-1, 0, 1], [1, -1, -1], [0, 1, 0]])
A_TO_C = [-1, 0, 1]


def test_chain_decomposition_and_cycle():
    res = decompositions(CHAIN, A_TO_C, with_cycles=True)
    assert res.vectors() == {(1, 1, 0)}
    assert [c.multipliers for c in res.cycles] == [(1, 0, 1)]
    assert all(c.is_cycle for c in res.cycles) and not res.truncated
    assert minimal_elements(brute_force_solutions(CHAIN, A_TO_C, bound=4)) == {(1, 1, 0)}


def test_single_step_is_its_own_decomposition():
    assert decompositions(CHAIN, CHAIN[:, 1]).vectors() == {(0, 1, 0)}


def test_solutions_satisfy_equation():
    for sol in decompositions(CHAIN, [-2, 0, 2]):
        assert np.array_equal(CHAIN @ np.array(sol.multipliers), [-2, 0, 2])


def test_infeasible_with_certificate():
    with pytest.raises(InfeasibleError) as info:
        decompositions(CHAIN, [1, 0, 0])
    cert = info.value.certificate
    assert cert is not None
    # the certificate separates w from the cone spanned by the steps
    assert all(sum(c * g for c, g in zip(cert, col)) <= 0 for col in CHAIN.T)
    assert sum(c * v for c, v in zip(cert, [1, 0, 0])) > 0


def test_reversible_pair_cycle():
    rep = cycles([[-1, 1], [1, -1]])
    assert rep.exists and rep.minimal_cycles == [(1, 1)]


def test_acyclic_chain():
    g = np.array([[-1, 0], [1, -1], [0, 1]])
    assert not cycles(g).exists and cycles(g).minimal_cycles == []
    res = decompositions(g, [-1, 0, 1], minimal_only=False)
    assert res.vectors() == {(1, 1)}


def test_wegscheider_cycles():
    gamma = load_builtin("wegscheider").network.gamma
    rep = cycles(gamma)
    assert rep.exists
    assert {(1, 1, 0, 0), (0, 0, 1, 1)} <= set(rep.minimal_cycles)
    assert minimal_elements(brute_force_solutions(gamma, [0, 0], bound=4)) == set(rep.minimal_cycles)


def test_all_decompositions_unbounded_with_cycles():
    with pytest.raises(UnboundedEnumerationError):
        decompositions(CHAIN, A_TO_C, minimal_only=False)


def test_truncation():
    # two parallel routes from A to D
    g = np.array([[-1, -1, 0, 0], [1, 0, -1, 0], [0, 1, 0, -1], [0, 0, 1, 1]])
    full = decompositions(g, [-1, 0, 0, 1])
    assert full.vectors() == {(1, 0, 1, 0), (0, 1, 0, 1)}
    cut = decompositions(g, [-1, 0, 0, 1], max_solutions=1)
    assert cut.truncated and len(cut) == 1 and cut.vectors() <= full.vectors()


def test_preprocess():
    pre = preprocess(CHAIN, A_TO_C)
    assert pre.forced_steps == [0, 1] and pre.excluded_steps == []
    assert preprocess(CHAIN, [0, 0, 0]).forced_steps == []
    # a fourth step D -> C that nothing can feed is excluded
    g = np.array([[-1, 0, 1, 0], [1, -1, -1, 0], [0, 1, 0, 1], [0, 0, 0, -1]])
    assert preprocess(g, [-1, 0, 1, 0]).excluded_steps == [3]
    with pytest.raises(InfeasibleError):
        preprocess(CHAIN, [0, 0, -1])


def test_zero_target():
    res = decompositions(CHAIN, [0, 0, 0], with_cycles=True)
    assert len(res) == 0 and [c.multipliers for c in res.cycles] == [(1, 0, 1)]


def test_input_validation():
    with pytest.raises(ValueError):
        decompositions([[0.5]], [1])
    with pytest.raises(ValueError):
        decompositions(CHAIN, [1, 0])


def test_heuristic_finds_valid_decompositions():
    sols = heuristic_decompositions(CHAIN, A_TO_C, samples=20, seed=1)
    assert (1, 1, 0) in {s.multipliers for s in sols}
    for s in sols:
        assert np.array_equal(CHAIN @ np.array(s.multipliers), A_TO_C)
    assert sols == heuristic_decompositions(CHAIN, A_TO_C, samples=20, seed=1)


@st.composite
def small_systems(draw):
    m = draw(st.integers(1, 3))
    r = draw(st.integers(1, 4))
    g = draw(st.lists(st.lists(st.integers(-2, 2), min_size=r, max_size=r), min_size=m, max_size=m))
    x = draw(st.lists(st.integers(0, 2), min_size=r, max_size=r))
    g = np.array(g)
    return g, g @ np.array(x)


@settings(max_examples=60, deadline=None)
@given(small_systems())
def test_cycle_free_systems_match_brute_force(system):
    g, w = system
    assert cycles_exist(g) == cycles_exist_by_support(g)
    if cycles_exist(g) or not w.any():
        return
    res = decompositions(g, w, minimal_only=False)
    sols = list(res.vectors())
    assert not any(u != v and all(a >= b for a, b in zip(v, u)) for u in sols for v in sols)
    brute = {v for v in brute_force_solutions(g, w, bound=6)}
    assert {v for v in sols if sum(v) <= 6} == brute
