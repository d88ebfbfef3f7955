"""Complex graph (Feinberg-Horn-Jackson graph) and structural indices."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import linalg
from .network import Complex, ReactionNetwork, reversible_pairs


@dataclass(frozen=True)
class ComplexGraph:
    complexes: tuple[Complex, ...]
    edges: tuple[tuple[int, int, int], ...]   # (source, target, step index)

    @property
    def n_vertices(self) -> int:
        return len(self.complexes)

    def adjacency(self):
        n = self.n_vertices
        if not self.edges:
            return coo_matrix((n, n), dtype=np.int8).tocsr()
        src, dst, _ = zip(*self.edges)
        return coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n)).tocsr()


@dataclass(frozen=True)
class StructureReport:
    N: int
    L: int
    S: int
    delta: int
    P: int
    linkage_classes: tuple[tuple[int, ...], ...]
    strong_components: tuple[tuple[int, ...], ...]
    terminal: tuple[bool, ...]
    weakly_reversible: bool

    @property
    def deficiency(self) -> int:
        return self.delta


def fhj_graph(net: ReactionNetwork) -> ComplexGraph:
    index = {c: i for i, c in enumerate(net.complexes)}
    edges = tuple((index[s.reactant], index[s.product], r) for r, s in enumerate(net.steps))
    return ComplexGraph(net.complexes, edges)


def _partition(labels: np.ndarray) -> tuple[tuple[int, ...], ...]:
    groups: dict[int, list[int]] = {}
    for v, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(v)
    # ordered by smallest member; members ascending
    return tuple(sorted((tuple(g) for g in groups.values()), key=lambda g: g[0]))


def linkage_classes(graph: ComplexGraph) -> tuple[tuple[int, ...], ...]:
    _, labels = connected_components(graph.adjacency(), directed=True, connection="weak")
    return _partition(labels)


def strong_components(graph: ComplexGraph) -> tuple[tuple[tuple[int, ...], ...], tuple[bool, ...]]:
    """Strongly connected components and, per component, whether it is terminal."""
    _, labels = connected_components(graph.adjacency(), directed=True, connection="strong")
    comps = _partition(labels)
    owner = {}
    for ci, comp in enumerate(comps):
        for v in comp:
            owner[v] = ci
    terminal = [True] * len(comps)
    for u, v, _ in graph.edges:
        if owner[u] != owner[v]:
            terminal[owner[u]] = False
    return comps, tuple(terminal)


def stoichiometric_rank(net: ReactionNetwork) -> int:
    return linalg.rank(net.gamma)


def structure_report(net: ReactionNetwork) -> StructureReport:
    graph = fhj_graph(net)
    lcs = linkage_classes(graph)
    comps, terminal = strong_components(graph)
    n, l, s = graph.n_vertices, len(lcs), stoichiometric_rank(net)
    return StructureReport(
        N=n, L=l, S=s, delta=n - l - s,
        P=len(reversible_pairs(net)),
        linkage_classes=lcs,
        strong_components=comps,
        terminal=terminal,
        # weakly reversible iff strong components coincide with linkage classes
        weakly_reversible=len(comps) == len(lcs),
    )


def deficiency(net: ReactionNetwork) -> int:
    return structure_report(net).delta


@dataclass(frozen=True)
class ConservationLaw:
    weights: tuple[int, ...]

    def as_fractions(self) -> list[Fraction]:
        return [Fraction(w) for w in self.weights]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.weights, dtype=dtype)

    def format(self, names) -> str:
        terms = []
        for w, n in zip(self.weights, names):
            if w == 0:
                continue
            coef = "" if abs(w) == 1 else f"{abs(w)}*"
            sign = "-" if w < 0 else "+"
            terms.append(f"{sign} {coef}{n}")
        text = " ".join(terms)
        return text[2:] if text.startswith("+ ") else text


def conservation_laws(net: ReactionNetwork) -> list[ConservationLaw]:
    """Reduced-echelon basis of the left null space of the stoichiometric matrix.

    Each vector is scaled to coprime integers with its first nonzero entry
    positive.  The basis has ``M - rank(gamma)`` elements.
    """
    basis = linalg.left_nullspace(net.gamma)
    return [ConservationLaw(tuple(linalg.primitive(v))) for v in basis]


def conservation_matrix(net: ReactionNetwork) -> np.ndarray:
    laws = conservation_laws(net)
    if not laws:
        return np.zeros((0, net.n_species))
    return np.array([law.weights for law in laws], dtype=float)


def to_dot(net: ReactionNetwork, labels=None, graph: ComplexGraph | None = None) -> str:
    """GraphViz text for the complex graph.

    Vertices of terminal strong components get ``terminal=true`` and a
    distinct fill colour.  ``labels`` optionally maps step index to an edge
    label (e.g. rate coefficient names).
    """
    graph = graph or fhj_graph(net)
    comps, terminal = strong_components(graph)
    term_vertex = set()
    for comp, t in zip(comps, terminal):
        if t:
            term_vertex.update(comp)
    lines = ["digraph FHJ {", "  rankdir=LR;", "  node [shape=box, style=filled, fillcolor=white];"]
    for i, c in enumerate(graph.complexes):
        text = net.format_complex(c).replace('"', '\\"')
        if i in term_vertex:
            lines.append(f'  c{i} [label="{text}", terminal=true, fillcolor="#c9a0dc"];')
        else:
            lines.append(f'  c{i} [label="{text}"];')
    for u, v, r in graph.edges:
        lab = labels[r] if labels is not None else f"k[{r + 1}]"
        lines.append(f'  c{u} -> c{v} [label="{lab}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
