"""Deterministic mass-action kinetics: rhs, Jacobian, integration, stationary points."""

from .integrate import METHODS, OdeTrajectory, integrate
from .kinetics import MassAction, jacobian, rhs
from .stationary import StationaryPoint, stationary_points

__all__ = ["METHODS", "MassAction", "OdeTrajectory", "StationaryPoint", "integrate", "jacobian",
           "rhs", "stationary_points"]
