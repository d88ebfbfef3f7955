"""Reaction mechanisms: species, complexes, steps and the network object.

The textual form accepted by :func:`parse_reactions` is::

    mechanism := reaction (sep reaction)*        sep is "," ";" or a newline
    reaction  := side ("->" | "<->") side
    side      := "0" | term ("+" term)*
    term      := [uint] name
    name      := ident | '"' any-chars-but-quote '"'

``#`` starts a comment that runs to the end of the line.  Quoted names let
charged species such as ``"Ag^+"`` appear in a mechanism.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DuplicateStepError,
    EmptyNetworkError,
    NonpositiveRateError,
    NullStepError,
    ReactionSyntaxError,
)

log = logging.getLogger(__name__)

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Species:
    name: str
    formula: Mapping[str, int] | None = field(default=None, compare=False)
    charge: int = field(default=0, compare=False)

    def __post_init__(self):
        if not self.name:
            raise ValueError("species name must be nonempty")
        if self.formula is not None and any(v < 0 for v in self.formula.values()):
            raise ValueError(f"negative element count in formula of {self.name}")


@dataclass(frozen=True, eq=False)
class Complex:
    """A formal sum of species with positive integer coefficients.

    Terms keep the order they were written in, but two complexes compare
    equal exactly when they are the same multiset.  The empty complex is
    the zero complex.
    """

    terms: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        names = [n for n, _ in self.terms]
        if len(set(names)) != len(names):
            raise ValueError("repeated species in complex terms")
        for name, coeff in self.terms:
            if not isinstance(coeff, (int, np.integer)) or coeff < 1:
                raise ValueError(f"complex coefficient for {name} must be a positive integer")
        object.__setattr__(self, "_key", frozenset(self.terms))

    def __eq__(self, other):
        if not isinstance(other, Complex):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    @classmethod
    def from_mapping(cls, coefficients: Mapping[str, int]) -> "Complex":
        return cls(tuple((n, int(c)) for n, c in coefficients.items() if c))

    @classmethod
    def zero(cls) -> "Complex":
        return cls(())

    def as_dict(self) -> dict[str, int]:
        return dict(self.terms)

    def __getitem__(self, name: str) -> int:
        return dict(self.terms).get(name, 0)

    def __bool__(self):
        return bool(self.terms)

    @property
    def species(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.terms)

    @property
    def order(self) -> int:
        return sum(c for _, c in self.terms)

    def format(self, order: Sequence[str] | None = None) -> str:
        """Render as DSL text, listing species in ``order`` when given."""
        if not self.terms:
            return "0"
        coeffs = dict(self.terms)
        names = [n for n in order if n in coeffs] if order is not None else list(coeffs)
        return " + ".join(_format_term(coeffs[n], n) for n in names)

    def __str__(self):
        return self.format()


def _quote(name: str) -> str:
    return name if _IDENT.match(name) else f'"{name}"'


def _format_term(coeff: int, name: str) -> str:
    return _quote(name) if coeff == 1 else f"{coeff} {_quote(name)}"


@dataclass(frozen=True)
class ReactionStep:
    reactant: Complex
    product: Complex
    # free-form per-step data (e.g. Arrhenius parameters); not part of identity
    metadata: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.reactant == self.product:
            raise NullStepError(f"reactant and product are both {self.reactant}")

    def reversed(self) -> "ReactionStep":
        return ReactionStep(self.product, self.reactant)

    def format(self, order: Sequence[str] | None = None) -> str:
        return f"{self.reactant.format(order)} -> {self.product.format(order)}"

    def __str__(self):
        return self.format()


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<darrow><->|<=>|↔)
  | (?P<arrow>->|=>|→)
  | (?P<number>\d+(?:\.\d*)?)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<quoted>"[^"\n]+")
  | (?P<plus>\+)
  | (?P<sep>[,;])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ReactionSyntaxError("unexpected character", position=pos, token=text[pos])
        kind = m.lastgroup
        if kind == "quoted":
            tokens.append(("ident", m.group()[1:-1], pos))
        elif kind not in ("ws", "comment"):
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, skip_newlines=True):
        if skip_newlines:
            while self.tokens[self.i][0] == "newline":
                self.i += 1
        return self.tokens[self.i]

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def fail(self, message, tok):
        raise ReactionSyntaxError(message, position=tok[2], token=tok[1] or "<end>")

    def mechanism(self) -> list[ReactionStep]:
        steps: list[ReactionStep] = []
        if self.peek()[0] == "eof":
            return steps
        while True:
            steps.extend(self.reaction())
            tok = self.peek(skip_newlines=False)
            if tok[0] in ("sep", "newline"):
                self.i += 1
                if self.peek()[0] == "eof":
                    break
                continue
            if tok[0] == "eof":
                break
            self.fail("expected ',' or end of input", tok)
        return steps

    def reaction(self) -> list[ReactionStep]:
        lhs = self.side()
        tok = self.take()
        if tok[0] not in ("arrow", "darrow"):
            self.fail("expected '->' or '<->'", tok)
        rhs = self.side()
        start = tok[2]
        try:
            forward = ReactionStep(lhs, rhs)
        except NullStepError:
            raise NullStepError(f"null step {lhs} -> {rhs} at position {start}") from None
        if tok[0] == "darrow":
            return [forward, forward.reversed()]
        return [forward]

    def side(self) -> Complex:
        tok = self.peek()
        if tok[0] == "number" and tok[1] == "0":
            nxt = self.tokens[self.i + 1]
            if nxt[0] != "ident":
                self.take()
                return Complex.zero()
        coeffs: dict[str, int] = {}
        while True:
            coeff, name = self.term()
            coeffs[name] = coeffs.get(name, 0) + coeff
            if self.peek(skip_newlines=False)[0] != "plus":
                break
            self.take()
        return Complex.from_mapping(coeffs)

    def term(self) -> tuple[int, str]:
        tok = self.take()
        coeff = 1
        if tok[0] == "number":
            if "." in tok[1]:
                self.fail("fractional stoichiometric coefficient", tok)
            coeff = int(tok[1])
            if coeff < 1:
                self.fail("coefficient must be a positive integer", tok)
            tok = self.take()
        if tok[0] != "ident":
            self.fail("expected species name", tok)
        return coeff, tok[1]


def parse_reactions(text: str) -> list[ReactionStep]:
    """Parse mechanism text into reaction steps.

    Each ``->`` gives one step and each ``<->`` gives the forward step
    followed by its reverse.
    """
    return _Parser(text).mechanism()


def _first_appearance(steps: Iterable[ReactionStep]) -> list[str]:
    seen: dict[str, None] = {}
    for step in steps:
        for cplx in (step.reactant, step.product):
            for name in cplx.species:
                seen.setdefault(name, None)
    return list(seen)


def parse_network(text: str) -> "ReactionNetwork":
    """Parse text and build the network, ordering species as they first appear."""
    return build_network(parse_reactions(text))


# -- the network -------------------------------------------------------------

class ReactionNetwork:
    """Species, steps and the molecularity matrices of a mechanism.

    ``alpha[m, r]`` and ``beta[m, r]`` are the reactant and product
    molecularities of species ``m`` in step ``r``; ``gamma = beta - alpha``
    is the stoichiometric matrix.  Instances are immutable.
    """

    def __init__(self, species: Sequence[Species], steps: Sequence[ReactionStep]):
        self._species = tuple(species)
        self._steps = tuple(steps)
        self._names = tuple(s.name for s in self._species)
        self._index = {n: i for i, n in enumerate(self._names)}
        m, r = len(self._species), len(self._steps)
        alpha = np.zeros((m, r), dtype=np.int64)
        beta = np.zeros((m, r), dtype=np.int64)
        for j, step in enumerate(self._steps):
            for name, c in step.reactant.terms:
                alpha[self._index[name], j] = c
            for name, c in step.product.terms:
                beta[self._index[name], j] = c
        gamma = beta - alpha
        for a in (alpha, beta, gamma):
            a.setflags(write=False)
        self.alpha, self.beta, self.gamma = alpha, beta, gamma
        self._complexes = None

    @property
    def species(self) -> tuple[Species, ...]:
        return self._species

    @property
    def species_names(self) -> tuple[str, ...]:
        return self._names

    @property
    def steps(self) -> tuple[ReactionStep, ...]:
        return self._steps

    @property
    def n_species(self) -> int:
        return len(self._species)

    @property
    def n_steps(self) -> int:
        return len(self._steps)

    def species_index(self, name: str) -> int:
        return self._index[name]

    @property
    def complexes(self) -> tuple[Complex, ...]:
        """Distinct complexes, in order of first appearance (reactant before product)."""
        if self._complexes is None:
            seen: dict[Complex, None] = {}
            for step in self._steps:
                seen.setdefault(step.reactant, None)
                seen.setdefault(step.product, None)
            self._complexes = tuple(seen)
        return self._complexes

    def complex_vector(self, cplx: Complex) -> np.ndarray:
        v = np.zeros(self.n_species, dtype=np.int64)
        for name, c in cplx.terms:
            v[self._index[name]] = c
        return v

    def format_complex(self, cplx: Complex) -> str:
        return cplx.format(self._names)

    def format_step(self, r: int) -> str:
        return self._steps[r].format(self._names)

    def to_dsl(self, merge_pairs: bool = True) -> str:
        """Render the network as mechanism text that parses back to an equal network.

        With ``merge_pairs`` a step immediately followed by its reverse is
        written once with ``<->``.
        """
        parts = []
        r = 0
        while r < self.n_steps:
            step = self._steps[r]
            if (merge_pairs and r + 1 < self.n_steps
                    and self._steps[r + 1] == step.reversed()):
                parts.append(f"{step.reactant.format(self._names)} <-> "
                             f"{step.product.format(self._names)}")
                r += 2
            else:
                parts.append(step.format(self._names))
                r += 1
        return ", ".join(parts)

    def __eq__(self, other):
        if not isinstance(other, ReactionNetwork):
            return NotImplemented
        return self._names == other._names and self._steps == other._steps

    def __hash__(self):
        return hash((self._names, self._steps))

    def __repr__(self):
        return f"ReactionNetwork({self.to_dsl()!r})"

    def __len__(self):
        return self.n_steps


def build_network(steps: Sequence[ReactionStep],
                  species: Sequence[str | Species] | None = None) -> ReactionNetwork:
    """Assemble a network from steps.

    Species are ordered by ``species`` when given (declared species that
    never occur in a step are dropped with a warning), otherwise by first
    appearance.  Steps keep their input order.
    """
    steps = list(steps)
    if not steps:
        raise EmptyNetworkError("a reaction network needs at least one step")
    seen: dict[ReactionStep, int] = {}
    for r, step in enumerate(steps):
        if step.reactant == step.product:
            raise NullStepError(f"step {r} has equal reactant and product")
        if step in seen:
            raise DuplicateStepError(f"step {r} ({step}) duplicates step {seen[step]}")
        seen[step] = r
    used = _first_appearance(steps)
    if species is None:
        spec = [Species(n) for n in used]
    else:
        declared = [s if isinstance(s, Species) else Species(s) for s in species]
        names = {s.name for s in declared}
        missing = [n for n in used if n not in names]
        if missing:
            raise ReactionSyntaxError(f"undeclared species {', '.join(missing)}")
        used_set = set(used)
        unused = [s.name for s in declared if s.name not in used_set]
        if unused:
            log.warning("dropping species that occur in no step: %s", ", ".join(unused))
        spec = [s for s in declared if s.name in used_set]
    return ReactionNetwork(spec, steps)


@dataclass(frozen=True)
class PairMatching:
    pairs: tuple[tuple[int, int], ...]
    fully_reversible: bool

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)


def reversible_pairs(net: ReactionNetwork) -> PairMatching:
    """Match each step with its reverse.

    Returns index pairs ``(i, j)`` with ``i < j`` such that step ``j`` is
    step ``i`` read backwards, and whether every step got matched.
    """
    where = {step: r for r, step in enumerate(net.steps)}
    pairs = []
    matched = set()
    for i, step in enumerate(net.steps):
        if i in matched:
            continue
        j = where.get(step.reversed())
        if j is not None and j not in matched:
            pairs.append((min(i, j), max(i, j)))
            matched.update((i, j))
    return PairMatching(tuple(pairs), len(matched) == net.n_steps)


def as_rates(net: ReactionNetwork, k) -> np.ndarray:
    """Validate a rate-coefficient vector (one strictly positive entry per step)."""
    arr = np.asarray(k, dtype=float).reshape(-1)
    if arr.shape[0] != net.n_steps:
        raise ValueError(f"expected {net.n_steps} rate coefficients, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise NonpositiveRateError("rate coefficients must be finite and strictly positive")
    return arr
