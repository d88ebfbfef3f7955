import pytest

from crnkit.chemkin import import_chemkin_subset
from crnkit.errors import EmptyNetworkError, MissingBlockError, ReactionSyntaxError

MECH = """\
ELEMENTS H O END
SPECIES
H2 O2 H2O
OH H
END
REACTIONS
H2 + O2 <=> 2OH     1.0E13  0.0  47000.
OH + H2 => H2O + H   2.1e8   1.5  3460  ! comment
END
"""


def test_species_and_steps():
    net = import_chemkin_subset(MECH)
    # declared order, species never used in a step are dropped
    assert net.species_names == ("H2", "O2", "H2O", "OH", "H")
    assert [net.format_step(r) for r in range(net.n_steps)] == [
        "H2 + O2 -> 2 OH", "2 OH -> H2 + O2", "H2 + OH -> H2O + H"]
    assert net.steps[0].metadata == (1.0e13, 0.0, 47000.0)


def test_missing_species_block():
    with pytest.raises(MissingBlockError):
        import_chemkin_subset("REACTIONS\nA => B 1 0 0\nEND\n")


def test_unknown_species_reports_line():
    with pytest.raises(ReactionSyntaxError) as info:
        import_chemkin_subset("SPECIES A B END\nREACTIONS\nA => C 1 0 0\nEND\n")
    assert info.value.line == 3


def test_third_body_refused():
    with pytest.raises(ReactionSyntaxError):
        import_chemkin_subset("SPECIES A B END\nREACTIONS\nA + M => B + M 1 0 0\nEND\n")


def test_missing_arrhenius():
    with pytest.raises(ReactionSyntaxError):
        import_chemkin_subset("SPECIES A B END\nREACTIONS\nA => B\nEND\n")


def test_no_reactions():
    with pytest.raises(EmptyNetworkError):
        import_chemkin_subset("SPECIES A B END\nREACTIONS\nEND\n")
