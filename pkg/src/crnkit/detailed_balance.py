"""Rate-coefficient conditions for detailed balance of reversible networks.

A fully reversible mass-action network is detailed balanced exactly when
two families of monomial identities hold among its rate coefficients:

* one circuit condition per independent cycle of the complex graph
  (``P - N + L`` of them), equating the coefficient products taken
  forwards and backwards around the cycle;
* one spanning-forest condition per unit of deficiency, obtained from a
  kernel vector of the matrix of reaction vectors of an oriented
  spanning forest.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import NotReversibleError
from .network import ReactionNetwork, as_rates, reversible_pairs
from .structure import ComplexGraph, fhj_graph


@dataclass(frozen=True)
class ForestEdge:
    pair: int          # index into the reversible-pair list
    source: int        # complex indices, in discovery direction
    target: int
    forward: int       # step source -> target
    backward: int      # step target -> source


@dataclass(frozen=True)
class SpanningForest:
    edges: tuple[ForestEdge, ...]
    roots: tuple[int, ...]
    non_forest_pairs: tuple[int, ...]


@dataclass(frozen=True)
class MonomialEquation:
    """``prod k[i]**lhs[i] == prod k[j]**rhs[j]`` over 0-based step indices."""

    lhs: tuple[tuple[int, int], ...]
    rhs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if set(dict(self.lhs)) & set(dict(self.rhs)):
            raise ValueError("a step may appear on one side only")
        if any(e < 1 for _, e in self.lhs + self.rhs):
            raise ValueError("exponents must be positive")

    @classmethod
    def from_exponents(cls, exponents: dict[int, int]) -> "MonomialEquation":
        lhs = tuple(sorted((i, e) for i, e in exponents.items() if e > 0))
        rhs = tuple(sorted((i, -e) for i, e in exponents.items() if e < 0))
        return cls(lhs, rhs)

    def exponents(self) -> dict[int, int]:
        out = dict(self.lhs)
        out.update((i, -e) for i, e in self.rhs)
        return out

    def log_residual(self, k) -> float:
        logk = np.log(np.asarray(k, dtype=float))
        left = sum(e * logk[i] for i, e in self.lhs)
        right = sum(e * logk[i] for i, e in self.rhs)
        return abs(left - right)

    def holds(self, k, tol: float = 1e-9) -> bool:
        return self.log_residual(k) <= tol

    def text(self) -> str:
        """Canonical text with 1-based indices, lowest-numbered coefficient on the right."""
        def side(terms):
            if not terms:
                return "1"
            return "*".join(f"k[{i + 1}]" if e == 1 else f"k[{i + 1}]^{e}" for i, e in terms)
        lhs, rhs = self.lhs, self.rhs
        if lhs and (not rhs or min(i for i, _ in lhs) < min(i for i, _ in rhs)):
            lhs, rhs = rhs, lhs
        return f"{side(lhs)} == {side(rhs)}"

    def to_json(self) -> dict:
        return {"lhs": {str(i + 1): e for i, e in self.lhs},
                "rhs": {str(i + 1): e for i, e in self.rhs},
                "text": self.text()}

    def __str__(self):
        return self.text()


def _require_reversible(net: ReactionNetwork):
    matching = reversible_pairs(net)
    if not matching.fully_reversible:
        paired = {i for p in matching.pairs for i in p}
        lonely = [net.format_step(r) for r in range(net.n_steps) if r not in paired]
        raise NotReversibleError("steps without a reverse: " + "; ".join(lonely))
    return matching.pairs


def _adjacency(graph: ComplexGraph, pairs):
    """Undirected adjacency: complex -> sorted list of (neighbour, pair index)."""
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in range(graph.n_vertices)}
    for p, (i, _) in enumerate(pairs):
        u, v, _ = graph.edges[i]
        adj[u].append((v, p))
        adj[v].append((u, p))
    for v in adj:
        adj[v].sort()
    return adj


def _step_between(graph: ComplexGraph, pairs, p: int, source: int) -> tuple[int, int]:
    i, j = pairs[p]
    if graph.edges[i][0] == source:
        return i, j
    return j, i


def spanning_forest(net: ReactionNetwork, root_order=None) -> SpanningForest:
    """Breadth-first spanning forest of the undirected complex graph.

    Each linkage class is entered at its lowest-index complex (or in
    ``root_order`` when given) and neighbours are visited in ascending
    complex index; edges point in the direction of discovery.
    """
    pairs = _require_reversible(net)
    graph = fhj_graph(net)
    adj = _adjacency(graph, pairs)
    order = list(root_order) if root_order is not None else list(range(graph.n_vertices))
    seen = set()
    edges, roots = [], []
    used_pairs = set()
    for root in order:
        if root in seen:
            continue
        roots.append(root)
        seen.add(root)
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v, p in adj[u]:
                if v in seen:
                    continue
                seen.add(v)
                fwd, bwd = _step_between(graph, pairs, p, u)
                edges.append(ForestEdge(p, u, v, fwd, bwd))
                used_pairs.add(p)
                queue.append(v)
    rest = tuple(p for p in range(len(pairs)) if p not in used_pairs)
    return SpanningForest(tuple(edges), tuple(roots), rest)


def _forest_path(forest: SpanningForest, a: int, b: int) -> list[tuple[int, int]]:
    """Directed walk a -> b inside the forest as a list of (step, reverse-step)."""
    parent: dict[int, tuple[int, ForestEdge]] = {}
    for e in forest.edges:
        parent[e.target] = (e.source, e)

    def to_root(v):
        path = [v]
        while v in parent:
            v = parent[v][0]
            path.append(v)
        return path

    up_a, up_b = to_root(a), to_root(b)
    common = next(v for v in up_a if v in set(up_b))
    walk = []
    v = a
    while v != common:            # climbing: traverse edges against discovery
        src, e = parent[v]
        walk.append((e.backward, e.forward))
        v = src
    down = []
    v = b
    while v != common:            # descending: along discovery direction
        src, e = parent[v]
        down.append((e.forward, e.backward))
        v = src
    return walk + down[::-1]


def circuit_conditions(net: ReactionNetwork, forest: SpanningForest | None = None) -> list[MonomialEquation]:
    """One equation per reversible pair outside the spanning forest.

    The pair's forward step ``u -> v`` is closed into a cycle by the forest
    path ``v -> u``; the coefficients of the steps along that orientation
    form the left side and those of their reverses the right side.
    """
    pairs = _require_reversible(net)
    graph = fhj_graph(net)
    forest = forest or spanning_forest(net)
    out = []
    for p in forest.non_forest_pairs:
        i, j = pairs[p]
        u, v, _ = graph.edges[i]
        cycle = [(i, j)] + _forest_path(forest, v, u)
        exps: dict[int, int] = {}
        for fwd, bwd in cycle:
            exps[fwd] = exps.get(fwd, 0) + 1
            exps[bwd] = exps.get(bwd, 0) - 1
        out.append(MonomialEquation.from_exponents({k: e for k, e in exps.items() if e}))
    return out


def forest_conditions(net: ReactionNetwork, forest: SpanningForest | None = None) -> list[MonomialEquation]:
    """Deficiency-many conditions from the kernel of the forest's reaction vectors."""
    _require_reversible(net)
    forest = forest or spanning_forest(net)
    if not forest.edges:
        return []
    graph = fhj_graph(net)
    vecs = [net.complex_vector(graph.complexes[e.target]) - net.complex_vector(graph.complexes[e.source])
            for e in forest.edges]
    mat = np.array(vecs, dtype=np.int64).T        # M x (N - L)
    out = []
    for a in linalg.nullspace(mat, len(forest.edges)):
        a = linalg.primitive(a)
        exps: dict[int, int] = {}
        for e, ae in zip(forest.edges, a):
            if ae:
                exps[e.forward] = exps.get(e.forward, 0) + ae
                exps[e.backward] = exps.get(e.backward, 0) - ae
        out.append(MonomialEquation.from_exponents({k: v for k, v in exps.items() if v}))
    return out


@dataclass
class DetailedBalanceReport:
    holds: bool
    circuit: list[MonomialEquation]
    forest: list[MonomialEquation]
    residuals: list[float]
    point_residuals: list[float] | None = None
    tol: float = 1e-9
    notes: list[str] = field(default_factory=list)

    @property
    def conditions(self) -> list[MonomialEquation]:
        return self.circuit + self.forest


def detailed_balance_conditions(net: ReactionNetwork, forest: SpanningForest | None = None):
    forest = forest or spanning_forest(net)
    return circuit_conditions(net, forest), forest_conditions(net, forest)


def check_detailed_balance(net: ReactionNetwork, k, tol: float = 1e-9, c_star=None,
                           forest: SpanningForest | None = None) -> DetailedBalanceReport:
    """Evaluate every circuit and forest condition at ``k``.

    Residuals are ``|log lhs - log rhs|``.  When a positive point
    ``c_star`` is given, the stepwise balance ``k_p c^alpha_p = k_-p c^beta_p``
    is also checked there (as a log residual per pair).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    k = as_rates(net, k)
    pairs = _require_reversible(net)
    circ, fc = detailed_balance_conditions(net, forest)
    residuals = [eq.log_residual(k) for eq in circ + fc]
    holds = all(r <= tol for r in residuals)
    notes = []
    if not circ:
        notes.append("complex graph has no cycle; only spanning forest conditions apply")
    report = DetailedBalanceReport(holds, circ, fc, residuals, tol=tol, notes=notes)
    if c_star is not None:
        c = np.asarray(c_star, dtype=float)
        if np.any(c <= 0):
            raise ValueError("c_star must be strictly positive")
        logc = np.log(c)
        pres = []
        for i, j in pairs:
            lf = math.log(k[i]) + float(net.alpha[:, i] @ logc)
            lb = math.log(k[j]) + float(net.alpha[:, j] @ logc)
            pres.append(abs(lf - lb))
        report.point_residuals = pres
        report.holds = holds and all(r <= tol for r in pres)
    return report


def balanced_rates(net: ReactionNetwork, k_forward, c_star) -> np.ndarray:
    """Rate vector that is detailed balanced at ``c_star`` by construction.

    For each pair ``(i, j)`` the forward coefficient is taken from
    ``k_forward`` (indexed by step) and the reverse one is set to
    ``k_i * c*^(alpha_i - alpha_j)``.
    """
    pairs = _require_reversible(net)
    k = np.asarray(k_forward, dtype=float).copy()
    c = np.asarray(c_star, dtype=float)
    for i, j in pairs:
        k[j] = k[i] * np.prod(c ** (net.alpha[:, i] - net.alpha[:, j]))
    return k
