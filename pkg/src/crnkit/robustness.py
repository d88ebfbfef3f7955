"""Sufficient test for absolute concentration robustness (ACR).

For a deficiency-one mass-action network that admits a positive
stationary point, a species is absolutely robust whenever two complexes
in nonterminal strong components differ in that species alone.
The test only ever certifies robustness; when the hypotheses fail it
reports that the criterion is inapplicable, never that a species is not
robust.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import NumericalError
from .network import ReactionNetwork, as_rates
from .structure import fhj_graph, strong_components, structure_report

ROBUST = "robust-species-found"
INAPPLICABLE = "theorem-inapplicable"
NO_POINT = "no-positive-point-found"


@dataclass
class AcrReport:
    deficiency: int
    positive_point: np.ndarray | None
    witness_pairs: list[tuple[int, int, int]]   # (complex, complex, species)
    robust_species: list[int]
    verdict: str
    notes: list[str] = field(default_factory=list)

    def to_json(self, net: ReactionNetwork) -> dict:
        names = net.species_names
        return {
            "verdict": self.verdict,
            "deficiency": self.deficiency,
            "robust_species": [names[i] for i in self.robust_species],
            "witness_pairs": [
                {"complexes": [net.format_complex(net.complexes[a]), net.format_complex(net.complexes[b])],
                 "species": names[s]}
                for a, b, s in self.witness_pairs
            ],
            "positive_point": None if self.positive_point is None else [float(v) for v in self.positive_point],
            "notes": list(self.notes),
        }


def nonterminal_pairs(net: ReactionNetwork) -> list[tuple[int, int, int]]:
    """Pairs of nonterminal complexes whose difference involves one species.

    Returns ``(i, j, s)`` with complex indices ``i < j`` (in the network's
    complex order) and ``s`` the index of the differing species.
    """
    graph = fhj_graph(net)
    comps, terminal = strong_components(graph)
    nonterminal = sorted(v for comp, t in zip(comps, terminal) if not t for v in comp)
    vectors = {v: net.complex_vector(graph.complexes[v]) for v in nonterminal}
    out = []
    for i, j in combinations(nonterminal, 2):
        support = np.flatnonzero(vectors[i] - vectors[j])
        if support.size == 1:
            out.append((i, j, int(support[0])))
    return out


def acr_test(net: ReactionNetwork, k, c0=None, *, starts: int = 16, seed: int = 0,
             positivity_tol: float = 1e-10) -> AcrReport:
    """Apply the deficiency-one ACR criterion.

    ``c0`` selects the compatibility class searched for a positive
    stationary point; it defaults to all ones.
    """
    from .deterministic import stationary_points

    k = as_rates(net, k)
    delta = structure_report(net).delta
    if delta != 1:
        return AcrReport(delta, None, [], [], INAPPLICABLE,
                         [f"deficiency is {delta}, the criterion needs deficiency one"])
    c0 = np.ones(net.n_species) if c0 is None else np.asarray(c0, dtype=float)
    notes = []
    try:
        points = stationary_points(net, k, c0, positivity=True, starts=starts, seed=seed,
                                   positivity_tol=positivity_tol)
    except NumericalError as exc:
        points = []
        notes.append(f"stationary point search failed: {exc}")
    pairs = nonterminal_pairs(net)
    if not points:
        return AcrReport(delta, None, pairs, [], NO_POINT,
                         notes + ["no positive stationary point was found numerically"])
    point = points[0].c
    if not pairs:
        return AcrReport(delta, point, [], [], INAPPLICABLE,
                         notes + ["no two nonterminal complexes differ in a single species"])
    robust = sorted({s for _, _, s in pairs})
    return AcrReport(delta, point, pairs, robust, ROBUST, notes)
