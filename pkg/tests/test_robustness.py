import numpy as np
import pytest

from crnkit import load_builtin, parse_network
from crnkit.deterministic import stationary_points
from crnkit.errors import NonpositiveRateError
from crnkit.robustness import INAPPLICABLE, NO_POINT, ROBUST, acr_test, nonterminal_pairs


def _pair_names(net, pairs):
    return {(str(net.complexes[a]), str(net.complexes[b]), net.species_names[s]) for a, b, s in pairs}


def test_r1_pairs():
    net = load_builtin("r1").network
    pairs = nonterminal_pairs(net)
    assert _pair_names(net, pairs) == {("A + B", "B", "A")}
    for a, b, _ in pairs:
        diff = net.complex_vector(net.complexes[a]) - net.complex_vector(net.complexes[b])
        assert np.count_nonzero(diff) == 1


def test_pair_with_two_differences_is_excluded():
    net = parse_network("A + 2 B -> 2 A, B -> C")
    assert nonterminal_pairs(net) == []


def test_single_step_has_no_pair():
    assert nonterminal_pairs(parse_network("A -> B")) == []


def test_r1_verdict():
    net = load_builtin("r1").network
    rep = acr_test(net, [2, 1], [2, 1])
    assert rep.verdict == ROBUST and rep.robust_species == [0]
    assert rep.deficiency == 1 and np.all(rep.positive_point > 0)


def test_envz_verdict():
    model = load_builtin("envz-ompr")
    rep = acr_test(model.network, model.rates, model.initial)
    assert rep.verdict == ROBUST
    assert model.network.species_index("Yp") in rep.robust_species
    assert _pair_names(model.network, rep.witness_pairs) == {("XT", "XT + Yp", "Yp")}


@pytest.mark.parametrize("text, delta", [("X1 <-> X2, X2 <-> X3", 0), ("A <-> B, 2 A <-> 2 B, 3 A <-> 3 B", 2)])
def test_other_deficiencies_inapplicable(text, delta):
    net = parse_network(text)
    rep = acr_test(net, np.ones(net.n_steps), np.ones(net.n_species))
    assert rep.deficiency == delta and rep.verdict == INAPPLICABLE


def test_ross_inapplicable():
    model = load_builtin("ross-chain")
    assert acr_test(model.network, model.rates).verdict == INAPPLICABLE


def test_no_positive_point():
    # r1 with a0 + b0 below k2/k1: only the boundary point exists
    rep = acr_test(load_builtin("r1").network, [1, 5], [1, 1])
    assert rep.verdict == NO_POINT and rep.robust_species == []


def test_nonpositive_rates():
    with pytest.raises(NonpositiveRateError):
        acr_test(load_builtin("r1").network, [0, 1], [1, 1])


def test_robust_value_independent_of_initial_state():
    net = load_builtin("r1").network
    k = [2.0, 1.0]
    rng = np.random.default_rng(0)
    values = []
    for _ in range(10):
        c0 = rng.uniform(0.5, 3.0, size=2)
        (p,) = stationary_points(net, k, c0, positivity=True)
        values.append(p.c[0])
    assert np.allclose(values, 0.5, rtol=1e-6)

    model = load_builtin("envz-ompr")
    yp = model.network.species_index("Yp")
    values = []
    for _ in range(10):
        c0 = rng.uniform(0.5, 2.0, size=model.network.n_species)
        pts = stationary_points(model.network, model.rates, c0, positivity=True)
        values.extend(p.c[yp] for p in pts)
    assert np.allclose(values, values[0], rtol=1e-6)
