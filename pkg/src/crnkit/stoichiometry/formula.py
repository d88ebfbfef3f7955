"""Chemical formulas and the atomic matrix.

Grammar (whitespace not allowed inside a formula)::

    formula := group+ charge? | "e" charge?
    group   := element uint? | "(" group+ ")" uint?
    charge  := "^" uint? ("+" | "-")

``e`` on its own is the electron; ``e`` and ``e^-`` both mean one unit of
negative charge and no atoms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from ..errors import FormulaSyntaxError, UnknownElementError

ELEMENTS = frozenset("""
H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co Ni Cu Zn Ga Ge As Se Br Kr
Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te I Xe Cs Ba La Ce Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb
Lu Hf Ta W Re Os Ir Pt Au Hg Tl Pb Bi Po At Rn Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm Md No Lr
Rf Db Sg Bh Hs Mt Ds Rg Cn Nh Fl Mc Lv Ts Og D T
""".split())

_TOKEN = re.compile(r"([A-Z][a-z]?)|(\()|(\))|(\d+)|(\^\d*[+-])")


@dataclass(frozen=True)
class Formula:
    text: str
    counts: tuple[tuple[str, int], ...]   # element -> count, in order of appearance
    charge: int

    def as_dict(self) -> dict[str, int]:
        return dict(self.counts)


def parse_formula(text: str) -> Formula:
    """Parse a formula such as ``S2O8^2-``, ``Ag(C2O4)^-`` or ``e^-``."""
    s = text.strip()
    if not s:
        raise FormulaSyntaxError("empty formula")
    if re.fullmatch(r"e(\^1?-)?", s):
        return Formula(s, (), -1)
    pos = 0
    stack: list[dict[str, int]] = [{}]
    order: list[str] = []
    charge = 0
    last_group: dict[str, int] | None = None
    last_element: str | None = None
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {s[pos]!r} at position {pos} in {text!r}")
        elem, opening, closing, number, chg = m.groups()
        if chg is not None and m.end() != len(s):
            raise FormulaSyntaxError(f"charge must end the formula {text!r}")
        if elem:
            if elem not in ELEMENTS:
                raise UnknownElementError(f"unknown element symbol {elem!r} in {text!r}")
            if elem not in order:
                order.append(elem)
            stack[-1][elem] = stack[-1].get(elem, 0) + 1
            last_element, last_group = elem, None
        elif opening:
            stack.append({})
            last_element = last_group = None
        elif closing:
            if len(stack) == 1:
                raise FormulaSyntaxError(f"unbalanced ')' in {text!r}")
            group = stack.pop()
            if not group:
                raise FormulaSyntaxError(f"empty group in {text!r}")
            for e, c in group.items():
                stack[-1][e] = stack[-1].get(e, 0) + c
            last_group, last_element = group, None
        elif number:
            n = int(number)
            if n < 1:
                raise FormulaSyntaxError(f"zero count in {text!r}")
            if last_element is not None:
                stack[-1][last_element] += n - 1
            elif last_group is not None:
                for e, c in last_group.items():
                    stack[-1][e] += c * (n - 1)
            else:
                raise FormulaSyntaxError(f"count without element in {text!r}")
            last_element = last_group = None
        else:
            mag = int(chg[1:-1] or 1)
            if mag < 1:
                raise FormulaSyntaxError(f"zero charge magnitude in {text!r}")
            charge = mag if chg[-1] == "+" else -mag
        pos = m.end()
    if len(stack) != 1:
        raise FormulaSyntaxError(f"unbalanced '(' in {text!r}")
    if not stack[0]:
        raise FormulaSyntaxError(f"no elements in {text!r}")
    return Formula(s, tuple((e, stack[0][e]) for e in order), charge)


@dataclass(frozen=True)
class AtomicMatrix:
    rows: tuple[str, ...]          # element symbols, then "charge"
    species: tuple[str, ...]
    matrix: np.ndarray             # len(rows) x len(species), int64

    @property
    def elements(self) -> tuple[str, ...]:
        return self.rows[:-1]

    @property
    def n_species(self) -> int:
        return len(self.species)

    def column(self, name: str) -> np.ndarray:
        return self.matrix[:, self.species.index(name)]

    def format(self) -> str:
        width = max(len(r) for r in self.rows)
        head = " " * width + "  " + " ".join(f"{s:>8}" for s in self.species)
        lines = [head]
        for label, row in zip(self.rows, self.matrix):
            lines.append(f"{label:>{width}}  " + " ".join(f"{v:>8d}" for v in row))
        return "\n".join(lines)


def atomic_matrix(formulas) -> AtomicMatrix:
    """Element rows (ordered by first appearance) plus a final charge row."""
    parsed = [f if isinstance(f, Formula) else parse_formula(f) for f in formulas]
    if len({f.text for f in parsed}) != len(parsed):
        raise FormulaSyntaxError("duplicate species formula")
    elements: list[str] = []
    for f in parsed:
        for e, _ in f.counts:
            if e not in elements:
                elements.append(e)
    mat = np.zeros((len(elements) + 1, len(parsed)), dtype=np.int64)
    for j, f in enumerate(parsed):
        for e, c in f.counts:
            mat[elements.index(e), j] = c
        mat[-1, j] = f.charge
    mat.setflags(write=False)
    return AtomicMatrix(tuple(elements) + ("charge",), tuple(f.text for f in parsed), mat)


def read_formula_file(text: str) -> list[str]:
    """One formula per line; ``#`` starts a comment, anything after whitespace is ignored."""
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(line.split()[0])
    return out
