from importlib.resources import files

import numpy as np
import pytest

from crnkit.errors import FormulaSyntaxError, UnknownElementError
from crnkit.stoichiometry import atomic_matrix, parse_formula, read_formula_file


def ops_formulas():
    return read_formula_file(files("crnkit").joinpath("data/ops16.formulas").read_text(encoding="utf-8"))


@pytest.mark.parametrize("text, counts, charge", [
    ("H2O", {"H": 2, "O": 1}, 0),
    ("S2O8^2-", {"S": 2, "O": 8}, -2),
    ("Ag^+", {"Ag": 1}, 1),
    ("Ag(C2O4)^-", {"Ag": 1, "C": 2, "O": 4}, -1),
    ("Ca(OH)2", {"Ca": 1, "O": 2, "H": 2}, 0),
    ("Fe2(SO4)3", {"Fe": 2, "S": 3, "O": 12}, 0),
    ("CH3COOH", {"C": 2, "H": 4, "O": 2}, 0),
    ("e^-", {}, -1),
    ("e", {}, -1),
])
def test_parse(text, counts, charge):
    f = parse_formula(text)
    assert f.as_dict() == counts and f.charge == charge


@pytest.mark.parametrize("text", ["", "h2o", "H2O^", "H2O^2-x", "(H2", "H2)", "()", "H0", "2H", "H2 O"])
def test_syntax_errors(text):
    with pytest.raises(FormulaSyntaxError):
        parse_formula(text)


def test_unknown_element():
    with pytest.raises(UnknownElementError):
        parse_formula("Xx2")


def test_water_system():
    am = atomic_matrix(["H2", "O2", "H2O"])
    assert am.rows == ("H", "O", "charge")
    assert am.matrix.tolist() == [[2, 0, 2], [0, 2, 1], [0, 0, 0]]


def test_electron_only():
    am = atomic_matrix(["e^-"])
    assert am.rows == ("charge",) and am.matrix.tolist() == [[-1]]


def test_ops_matrix():
    am = atomic_matrix(ops_formulas())
    assert am.matrix.shape == (6, 16)
    assert set(am.elements) == {"Ag", "H", "S", "O", "C"}
    assert np.all(am.matrix[:-1] >= 0)
    assert am.column("S2O8^2-").tolist() == [0, 0, 2, 8, 0, -2]
    assert am.column("Ag(C2O4)^-")[-1] == -1


def test_duplicates_rejected():
    with pytest.raises(FormulaSyntaxError):
        atomic_matrix(["H2", "H2"])


def test_formula_file_comments():
    assert read_formula_file("# header\nH2   # hydrogen\n\nO2 extra\n") == ["H2", "O2"]
