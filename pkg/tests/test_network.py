import numpy as np
import pytest
from hypothesis import given, settings

from crnkit import Complex, ReactionStep, build_network, parse_network, parse_reactions, reversible_pairs
from crnkit.errors import (DuplicateStepError, EmptyNetworkError, NonpositiveRateError, NullStepError,
                           ReactionSyntaxError)
from crnkit.network import as_rates

from strategies import networks


def test_r1_matrices():
    net = parse_network("A + B -> 2 B, B -> A")
    assert net.species_names == ("A", "B")
    assert net.alpha.tolist() == [[1, 0], [1, 1]]
    assert net.beta.tolist() == [[0, 1], [2, 0]]
    assert net.gamma.tolist() == [[-1, 1], [1, -1]]
    assert [str(c) for c in net.complexes] == ["A + B", "2 B", "B", "A"]


def test_reversible_arrow_expands_to_two_steps():
    steps = parse_reactions("A <-> B")
    assert steps == [ReactionStep(Complex.from_mapping({"A": 1}), Complex.from_mapping({"B": 1})),
                     ReactionStep(Complex.from_mapping({"B": 1}), Complex.from_mapping({"A": 1}))]


def test_zero_complex_and_arrows_without_spaces():
    net = parse_network("0->X1,X1<->X2;X2->0")
    assert net.n_steps == 4
    assert Complex.zero() in net.complexes
    assert net.alpha[:, 0].tolist() == [0, 0]


def test_separators_and_comments():
    net = parse_network("A -> B   # first\nB -> C\n\n# trailing comment\n")
    assert net.n_steps == 2


def test_quoted_names():
    net = parse_network('"Ag^+" + "C2O4^2-" -> "Ag(C2O4)^-"')
    assert net.species_names == ("Ag^+", "C2O4^2-", "Ag(C2O4)^-")


def test_complex_equality_is_multiset():
    assert Complex.from_mapping({"A": 1, "B": 2}) == Complex((("B", 2), ("A", 1)))
    assert hash(Complex.from_mapping({"A": 1, "B": 2})) == hash(Complex((("B", 2), ("A", 1))))
    assert Complex.zero().order == 0


def test_repeated_species_in_a_side_add_up():
    net = parse_network("A + A -> B")
    assert net.alpha[:, 0].tolist() == [2, 0]


@pytest.mark.parametrize("text, position", [
    ("A -> ", 5),
    ("A B -> C", 2),
    ("A -> B,, C -> D", 7),
    ("1.5 A -> B", 0),
    ("A -> $", 5),
])
def test_syntax_errors_report_position(text, position):
    with pytest.raises(ReactionSyntaxError) as info:
        parse_reactions(text)
    assert info.value.position == position


def test_zero_coefficient_rejected():
    with pytest.raises(ReactionSyntaxError):
        parse_reactions("0 A -> B")


def test_null_and_duplicate_steps():
    with pytest.raises(NullStepError):
        parse_network("A -> A")
    with pytest.raises(DuplicateStepError):
        parse_network("A -> B, A -> B")
    with pytest.raises(EmptyNetworkError):
        parse_network("")


def test_declared_species_order():
    steps = parse_reactions("A -> B")
    net = build_network(steps, species=["B", "A"])
    assert net.species_names == ("B", "A")
    with pytest.raises(ReactionSyntaxError):
        build_network(steps, species=["A"])


def test_reversible_pairs():
    net = parse_network("A <-> B, B -> C, 2 A <-> A + B")
    pairs = reversible_pairs(net)
    assert pairs.pairs == ((0, 1), (3, 4))
    assert not pairs.fully_reversible
    assert reversible_pairs(parse_network("A <-> B, C <-> D")).fully_reversible


def test_rates_validation():
    net = parse_network("A -> B")
    assert as_rates(net, [2]).tolist() == [2.0]
    with pytest.raises(NonpositiveRateError):
        as_rates(net, [0.0])
    with pytest.raises(ValueError):
        as_rates(net, [1, 2])


@settings(max_examples=100, deadline=None)
@given(networks())
def test_dsl_round_trip(net):
    again = parse_network(net.to_dsl())
    assert again.steps == net.steps
    assert np.array_equal(again.gamma, net.gamma)
