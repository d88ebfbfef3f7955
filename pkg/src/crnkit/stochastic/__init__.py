"""Stochastic mass-action simulation: direct SSA, tau-leaping and ensembles."""

from .ensemble import EnsembleRunError, EnsembleStats, ensemble
from .rng import RandomStream, child_seed
from .simulate import JumpTrajectory, propensities, ssa_direct, stochastic_rates, tau_leap

__all__ = ["EnsembleRunError", "EnsembleStats", "JumpTrajectory", "RandomStream", "child_seed", "ensemble",
           "propensities", "ssa_direct", "stochastic_rates", "tau_leap"]
