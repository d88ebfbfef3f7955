import numpy as np
import pytest
from hypothesis import given, settings

from crnkit import conservation_laws, load_builtin, parse_network, structure_report
from crnkit.structure import deficiency, fhj_graph, linkage_classes, strong_components, to_dot

from strategies import networks


@pytest.mark.parametrize("model, triple", [
    ("wegscheider-irrev", (4, 2, 1, 1)),
    ("envz-ompr", (9, 3, 5, 1)),
    ("ross-chain", (9, 1, 8, 0)),
    ("wegscheider", (4, 2, 1, 1)),
])
def test_builtin_indices(model, triple):
    rep = structure_report(load_builtin(model).network)
    assert (rep.N, rep.L, rep.S, rep.deficiency) == triple


def test_single_step():
    rep = structure_report(parse_network("A -> B"))
    assert (rep.N, rep.L, rep.S, rep.deficiency) == (2, 1, 1, 0)
    assert rep.terminal == (False, True)


def test_terminal_components_of_r1():
    net = load_builtin("r1").network
    comps, terminal = strong_components(fhj_graph(net))
    labels = {tuple(str(net.complexes[v]) for v in c): t for c, t in zip(comps, terminal)}
    assert labels == {("A + B",): False, ("2 B",): True, ("B",): False, ("A",): True}


def test_weak_reversibility():
    assert structure_report(parse_network("A -> B, B -> C, C -> A")).weakly_reversible
    assert not structure_report(parse_network("A -> B, B -> C")).weakly_reversible


def test_linkage_classes_partition():
    net = parse_network("A <-> B, C + D -> E, E -> F")
    lcs = linkage_classes(fhj_graph(net))
    assert lcs == ((0, 1), (2, 3, 4))


def test_conservation_laws():
    laws = conservation_laws(load_builtin("r1").network)
    assert [law.weights for law in laws] == [(1, 1)]
    assert conservation_laws(load_builtin("ross-chain").network) == []
    laws = conservation_laws(load_builtin("envz-ompr").network)
    assert len(laws) == 2


def test_dot_output():
    dot = to_dot(load_builtin("r1").network)
    assert dot.startswith("digraph FHJ {")
    assert dot.count("->") == 2
    assert 'label="k[2]"' in dot


@settings(max_examples=100, deadline=None)
@given(networks())
def test_deficiency_nonnegative_and_laws_annihilate_gamma(net):
    rep = structure_report(net)
    assert rep.deficiency >= 0
    assert rep.deficiency == deficiency(net)
    assert rep.S == np.linalg.matrix_rank(net.gamma.astype(float))
    laws = conservation_laws(net)
    assert len(laws) == net.n_species - rep.S
    for law in laws:
        assert not np.any(np.array(law.weights) @ net.gamma)
