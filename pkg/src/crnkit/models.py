"""Built-in mechanisms used throughout the examples and tests."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import UnknownModelError
from .network import ReactionNetwork, parse_network

# 0 -> X1 <-> ... <-> X8 -> 0, coefficients ordered k0, k1, k-1, ..., k7, k-7, k8
ROSS_RATES = (0.1, 2, 0.1, 8, 5, 3, 0.4, 1, 1, 6, 0.5, 4, 2, 10, 1, 1)


@dataclass(frozen=True)
class BuiltinModel:
    name: str
    network: ReactionNetwork
    rates: np.ndarray | None = None
    initial: np.ndarray | None = None
    note: str = ""


def _chain_text(n: int) -> str:
    return ", ".join(f"X{i} <-> X{i + 1}" for i in range(1, n))


_TEXT = {
    "wegscheider": "A <-> B, 2 A <-> A + B",
    "wegscheider-irrev": "A + B -> 2 B, B -> A",
    # Shinar-Feinberg EnvZ-OmpR; the last step is one-way as in their model
    "envz-ompr": "X <-> XT, XT -> Xp, Xp + Y <-> XpY, XpY -> X + Yp, "
                 "XT + Yp <-> XTYp, XTYp -> XT + Y",
    "ross-chain": "0 -> X1, " + _chain_text(8) + ", X8 -> 0",
    "lotka-volterra": "X -> 2 X, X + Y -> 2 Y, Y -> 0",
    "consecutive": "A -> B, B -> C",
}

_ALIASES = {"r1": "wegscheider-irrev", "r5": "envz-ompr", "jr": "ross-chain"}

AVAILABLE = tuple(_TEXT) + ("chain(n)",)


def _builtin(name: str) -> BuiltinModel:
    if name == "ross-chain":
        return BuiltinModel(name, parse_network(_TEXT[name]), np.array(ROSS_RATES, dtype=float))
    if name == "lotka-volterra":
        return BuiltinModel(name, parse_network(_TEXT[name]),
                            np.array([1.0, 1.0 / 1000.0, 1.0]), np.array([600.0, 400.0]))
    if name == "envz-ompr":
        net = parse_network(_TEXT[name])
        return BuiltinModel(name, net, np.ones(net.n_steps), np.ones(net.n_species),
                            note="rate coefficients and initial state are arbitrary all-ones defaults")
    if name == "consecutive":
        return BuiltinModel(name, parse_network(_TEXT[name]), np.ones(2), np.array([1.0, 0.0, 0.0]),
                            note="rate coefficients are arbitrary defaults")
    return BuiltinModel(name, parse_network(_TEXT[name]))


def chain(n: int) -> BuiltinModel:
    """X1 <-> X2 <-> ... <-> Xn with k = (1, ..., 2n-2) and c0_i = 0.1 i."""
    if n < 2:
        raise ValueError("chain(n) needs n >= 2")
    net = parse_network(_chain_text(n))
    rates = np.arange(1, 2 * (n - 1) + 1, dtype=float)
    initial = 0.1 * np.arange(1, n + 1, dtype=float)
    return BuiltinModel(f"chain({n})", net, rates, initial)


def load_builtin(name: str) -> BuiltinModel:
    key = name.strip().lower()
    key = _ALIASES.get(key, key)
    m = re.fullmatch(r"(?:chain|lendvay)\s*[\(\[]\s*(\d+)\s*[\)\]]", key)
    if m:
        return chain(int(m.group(1)))
    if key not in _TEXT:
        raise UnknownModelError(name, AVAILABLE)
    return _builtin(key)
