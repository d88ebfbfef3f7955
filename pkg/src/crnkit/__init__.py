"""Analysis and simulation of chemical reaction networks with mass-action kinetics."""

from .errors import CrnError
from .models import load_builtin
from .network import (Complex, ReactionNetwork, ReactionStep, Species, build_network, parse_network,
                      parse_reactions, reversible_pairs)
from .structure import conservation_laws, fhj_graph, structure_report

__version__ = "0.1.0"

__all__ = ["Complex", "CrnError", "ReactionNetwork", "ReactionStep", "Species", "build_network",
           "conservation_laws", "fhj_graph", "load_builtin", "parse_network", "parse_reactions",
           "reversible_pairs", "structure_report"]
