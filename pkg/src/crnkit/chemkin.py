"""Import of a small CHEMKIN subset.

Only the SPECIES and REACTIONS blocks are read.  A reaction line is an
equation followed by an Arrhenius triple ``A b E``; ``=`` and ``<=>``
give a reversible pair, ``=>`` a single step.  The Arrhenius numbers are
kept as step metadata on the forward step and are not interpreted.
Third bodies, falloff ``(+M)`` and auxiliary keyword lines are refused.
"""

from __future__ import annotations

import re

from .errors import EmptyNetworkError, MissingBlockError, ReactionSyntaxError
from .network import Complex, ReactionNetwork, ReactionStep, Species, build_network

_BLOCK_START = {"SPECIES": "species", "SPEC": "species", "REACTIONS": "reactions", "REAC": "reactions",
                "ELEMENTS": "elements", "ELEM": "elements", "THERMO": "thermo", "TRANSPORT": "transport"}
_AUX = {"LOW", "TROE", "SRI", "REV", "DUP", "DUPLICATE", "PLOG", "CHEB", "TCHEB", "PCHEB",
        "FORD", "RORD", "HIGH", "LT", "RLT", "UNITS", "XSMI", "MOME", "TDEP", "EXCI", "JAN", "FIT1"}
_NUMBER = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eEdD][+-]?\d+)?\Z")


def _blocks(text: str) -> dict[str, list[tuple[int, str]]]:
    """Lines of each keyword block; ``END`` may close a block mid-line (``SPECIES A B END``)."""
    blocks: dict[str, list[tuple[int, str]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        words = raw.split("!", 1)[0].split()
        while words:
            if current is None:
                head = words.pop(0).upper()
                if head in _BLOCK_START:
                    current = _BLOCK_START[head]
                    blocks.setdefault(current, [])
                    # REACTIONS and THERMO headers only carry options
                    if current in ("reactions", "thermo"):
                        words = []
                continue
            upper = [w.upper() for w in words]
            if "END" in upper:
                cut = upper.index("END")
                if cut:
                    blocks[current].append((lineno, " ".join(words[:cut])))
                words = words[cut + 1:]
                current = None
            else:
                blocks[current].append((lineno, " ".join(words)))
                words = []
    return blocks


def _split_species(side: str, known: set[str], lineno: int) -> dict[str, int]:
    side = side.strip()
    if re.search(r"\(\s*\+", side):
        raise ReactionSyntaxError("pressure-dependent (+M) reactions are not supported", line=lineno)
    pieces = side.split("+")
    coeffs: dict[str, int] = {}
    i = 0
    while i < len(pieces):
        # species names may contain '+': grow the piece until it is known
        for j in range(len(pieces), i, -1):
            cand = "+".join(pieces[i:j]).strip()
            name, coeff = _strip_coeff(cand, known)
            if name is not None:
                coeffs[name] = coeffs.get(name, 0) + coeff
                i = j
                break
        else:
            token = pieces[i].strip()
            if token.upper() == "M":
                raise ReactionSyntaxError("third-body reactions are not supported", line=lineno, token=token)
            raise ReactionSyntaxError("unknown species", line=lineno, token=token)
    return coeffs


def _strip_coeff(token: str, known: set[str]) -> tuple[str | None, int]:
    if token in known:
        return token, 1
    m = re.match(r"(\d+)\s*(.+)\Z", token)
    if m and m.group(2) in known:
        c = int(m.group(1))
        if c < 1:
            return None, 0
        return m.group(2), c
    return None, 0


def import_chemkin_subset(text: str) -> ReactionNetwork:
    blocks = _blocks(text)
    if "species" not in blocks:
        raise MissingBlockError("no SPECIES ... END block found")
    declared: list[str] = []
    for _, line in blocks["species"]:
        for name in line.split():
            if name not in declared:
                declared.append(name)
    known = set(declared)
    steps: list[ReactionStep] = []
    for lineno, line in blocks.get("reactions", []):
        words = line.split()
        if words[0].upper().split("/")[0] in _AUX or "/" in line:
            raise ReactionSyntaxError("auxiliary reaction keywords are not supported",
                                      line=lineno, token=words[0])
        if len(words) < 4 or not all(_NUMBER.match(w) for w in words[-3:]):
            raise ReactionSyntaxError("expected an equation followed by A, b, E", line=lineno)
        arrhenius = tuple(float(w.replace("d", "e").replace("D", "e")) for w in words[-3:])
        equation = "".join(words[:-3])
        m = re.fullmatch(r"(.+?)(<=>|=>|=)(.+)", equation)
        if m is None:
            raise ReactionSyntaxError("no '=' or '=>' in reaction", line=lineno, token=equation)
        lhs = Complex.from_mapping(_split_species(m.group(1), known, lineno))
        rhs = Complex.from_mapping(_split_species(m.group(3), known, lineno))
        if lhs == rhs:
            raise ReactionSyntaxError("null reaction", line=lineno, token=equation)
        steps.append(ReactionStep(lhs, rhs, metadata=arrhenius))
        if m.group(2) != "=>":
            steps.append(ReactionStep(rhs, lhs))
    if not steps:
        raise EmptyNetworkError("the mechanism contains no reactions")
    return build_network(steps, species=[Species(n) for n in declared])
