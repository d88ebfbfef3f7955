"""Direct-method SSA and explicit tau-leaping for the jump-process model."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import LeapFailureError, NegativeConcentrationError
from ..network import ReactionNetwork, as_rates
from .rng import RandomStream

AVOGADRO = 6.02214076e23
MAX_HALVINGS = 20
FALLBACK_SSA_STEPS = 100


@dataclass
class JumpTrajectory:
    times: np.ndarray            # float, increasing, starts at t0
    counts: np.ndarray           # int64, len(times) x M
    species: tuple[str, ...]
    seed: int
    method: str                  # "direct" or "tau-leap"
    absorbed: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def final(self) -> np.ndarray:
        return self.counts[-1]

    def sample(self, times) -> np.ndarray:
        """State holding at each requested time (last state at or before it)."""
        idx = np.searchsorted(self.times, np.asarray(times, dtype=float), side="right") - 1
        if np.any(idx < 0):
            raise ValueError("sample time precedes the start of the trajectory")
        return self.counts[idx]

    def to_csv(self, sep: str = ",") -> str:
        lines = [sep.join(["t", *self.species])]
        for t, row in zip(self.times, self.counts):
            lines.append(sep.join([f"{t:.17g}", *map(str, row)]))
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"species": list(self.species), "times": [float(t) for t in self.times],
                "counts": self.counts.tolist(),
                "metadata": {"seed": self.seed, "method": self.method, "absorbed": self.absorbed, **self.extra}}


class _Compiled:
    """Per-step reactant and change lists plus the propensity dependency graph."""

    def __init__(self, net: ReactionNetwork, k):
        self.k = as_rates(net, k).tolist()
        self.m, self.r = net.n_species, net.n_steps
        alpha, gamma = net.alpha, net.gamma
        self.reactants = [[(int(i), int(alpha[i, r])) for i in np.flatnonzero(alpha[:, r])]
                          for r in range(self.r)]
        self.changes = [[(int(i), int(gamma[i, r])) for i in np.flatnonzero(gamma[:, r])]
                        for r in range(self.r)]
        users: list[set[int]] = [set() for _ in range(self.m)]
        for r, terms in enumerate(self.reactants):
            for i, _ in terms:
                users[i].add(r)
        self.depends = [sorted({q for i, _ in self.changes[r] for q in users[i]}) for r in range(self.r)]
        self.changed_by = [[(r, int(gamma[i, r])) for r in np.flatnonzero(gamma[i])] for i in range(self.m)]
        self.order = [sum(a for _, a in terms) for terms in self.reactants]
        # per species: (highest order among steps consuming it, max copies needed)
        self.hor: dict[int, tuple[int, int]] = {}
        for r, terms in enumerate(self.reactants):
            for i, a in terms:
                o, need = self.hor.get(i, (0, 0))
                if (self.order[r], a) > (o, need):
                    self.hor[i] = (self.order[r], a)

    def propensity(self, r: int, x) -> float:
        a = self.k[r]
        for i, n in self.reactants[r]:
            xi = x[i]
            for j in range(n):
                a *= xi - j
            if a <= 0:
                return 0.0
        return a

    def all_propensities(self, x) -> list[float]:
        return [self.propensity(r, x) for r in range(self.r)]


def propensities(net: ReactionNetwork, k, x) -> np.ndarray:
    """Combinatorial mass-action propensities ``k_r prod x_m (x_m - 1) ... (x_m - alpha_mr + 1)``."""
    x = _counts(net, x)
    return np.array(_Compiled(net, k).all_propensities(x.tolist()))


def stochastic_rates(net: ReactionNetwork, k_det, volume: float) -> np.ndarray:
    """Convert deterministic coefficients to stochastic ones: ``k (N_A V)**(1 - order)``."""
    if volume <= 0:
        raise ValueError("volume must be positive")
    k = as_rates(net, k_det)
    order = net.alpha.sum(axis=0)
    return k * (AVOGADRO * volume) ** (1.0 - order)


def _counts(net: ReactionNetwork, x0) -> np.ndarray:
    arr = np.asarray(x0)
    if arr.shape != (net.n_species,):
        raise ValueError(f"expected {net.n_species} counts")
    if not np.all(np.equal(np.mod(arr, 1), 0)):
        raise ValueError("molecule counts must be integers")
    arr = arr.astype(np.int64)
    if np.any(arr < 0):
        raise NegativeConcentrationError("molecule counts must be nonnegative")
    return arr


class _Recorder:
    """Keeps every state, or only the states holding at fixed sample times."""

    def __init__(self, t0, x, sample_times=None):
        self.grid = None if sample_times is None else np.asarray(sample_times, dtype=float)
        if self.grid is None:
            self.times, self.states = [t0], [list(x)]
        else:
            self.times, self.states = list(self.grid), []
            self.pos = 0
            self._fill(t0, x, inclusive=True)

    def _fill(self, t, x, inclusive):
        grid = self.grid
        while self.pos < len(grid) and (grid[self.pos] < t or (inclusive and grid[self.pos] == t)):
            self.states.append(list(x))
            self.pos += 1

    def jump(self, t, x_before, x_after):
        if self.grid is None:
            self.times.append(t)
            self.states.append(list(x_after))
        else:
            self._fill(t, x_before, inclusive=False)

    def finish(self, x):
        if self.grid is not None:
            while self.pos < len(self.grid):
                self.states.append(list(x))
                self.pos += 1

    def arrays(self, m):
        return np.array(self.times, dtype=float), np.array(self.states, dtype=np.int64).reshape(-1, m)


def _direct_steps(comp: _Compiled, x, a, t, t_max, rng, rec, limit=None):
    """Run direct-method events until t_max, absorption or ``limit`` events.

    Mutates ``x`` and ``a`` in place; returns (t, events, absorbed).
    """
    events = 0
    changes, depends, prop, rn = comp.changes, comp.depends, comp.propensity, comp.r
    while limit is None or events < limit:
        a0 = math.fsum(a)
        if a0 <= 0:
            return t, events, True
        t_next = t + rng.exponential(a0)
        if t_next > t_max:
            return t_max, events, False
        target = rng.uniform() * a0
        acc = 0.0
        r = rn - 1
        for q in range(rn):
            acc += a[q]
            if target < acc:
                r = q
                break
        while a[r] <= 0:          # guard against rounding onto a zero slot
            r -= 1
        before = list(x) if rec.grid is not None else None
        for i, d in changes[r]:
            x[i] += d
        for q in depends[r]:
            a[q] = prop(q, x)
        t = t_next
        rec.jump(t, before, x)
        events += 1
    return t, events, False


def ssa_direct(net: ReactionNetwork, k, x0, t_max: float, seed: int = 0, *, t0: float = 0.0,
               sample_times=None) -> JumpTrajectory:
    """Gillespie's direct method.

    Waiting times are exponential with rate ``a0 = sum(a)``; the firing
    step is chosen by a linear search over cumulative propensities.  Only
    propensities that depend on species changed by the last event are
    recomputed.  The run stops at ``t_max`` or when every propensity
    vanishes, in which case ``absorbed`` is set.

    With ``sample_times`` only the states holding at those times are kept.
    """
    if not t_max > t0:
        raise ValueError("t_max must exceed t0")
    x = _counts(net, x0).tolist()
    comp = _Compiled(net, k)
    rng = RandomStream(seed)
    rec = _Recorder(t0, x, sample_times)
    a = comp.all_propensities(x)
    t, events, absorbed = _direct_steps(comp, x, a, t0, t_max, rng, rec)
    rec.finish(x)
    times, counts = rec.arrays(comp.m)
    return JumpTrajectory(times, counts, net.species_names, seed, "direct", absorbed,
                          {"events": events, "t_end": t})


def _select_tau(comp: _Compiled, x, a, eps):
    """Tau from the bounded relative propensity change criterion."""
    tau = math.inf
    for i, (order, need) in comp.hor.items():
        xi = x[i]
        if order == 1:
            g = 1.0
        elif order == 2:
            g = 2.0 + 1.0 / (xi - 1) if need == 2 and xi > 1 else 2.0
        elif order == 3:
            if need == 3 and xi > 2:
                g = 3.0 + 1.0 / (xi - 1) + 2.0 / (xi - 2)
            elif need == 2 and xi > 1:
                g = 1.5 * (2.0 + 1.0 / (xi - 1))
            else:
                g = 3.0
        else:
            g = float(order)
        mu = sigma2 = 0.0
        for r, v in comp.changed_by[i]:
            ar = a[r]
            mu += v * ar
            sigma2 += v * v * ar
        bound = max(eps * xi / g, 1.0)
        if mu:
            tau = min(tau, bound / abs(mu))
        if sigma2:
            tau = min(tau, bound * bound / sigma2)
    return tau


def tau_leap(net: ReactionNetwork, k, x0, t_max: float, eps: float = 0.03, seed: int = 0, *,
             t0: float = 0.0, midpoint: bool = True, sample_times=None) -> JumpTrajectory:
    """Explicit tau-leaping.

    Each leap length comes from the bounded relative propensity change
    criterion with parameter ``eps`` (Cao, Gillespie and Petzold's
    species-based bound with highest-order-reaction factors).  Firing
    counts are Poisson with mean ``a_r tau``.  With ``midpoint`` (the
    default) propensities are evaluated at the estimated midpoint state
    ``x + tau/2 * gamma a(x)`` (clipped at zero), which removes the
    first-order bias of the plain Euler leap.

    A leap that would make a count negative is retried with ``tau``
    halved, at most 20 times; after that 100 direct-method events are
    simulated instead.
    """
    if not 0 < eps <= 0.2:
        raise ValueError("eps must lie in (0, 0.2]")
    if not t_max > t0:
        raise ValueError("t_max must exceed t0")
    x = _counts(net, x0).tolist()
    comp = _Compiled(net, k)
    rng = RandomStream(seed)
    rec = _Recorder(t0, x, sample_times)
    gamma_rows = [comp.changes[r] for r in range(comp.r)]
    t = t0
    leaps = fallbacks = halvings = 0
    absorbed = False
    while t < t_max:
        a = comp.all_propensities(x)
        if math.fsum(a) <= 0:
            absorbed = True
            break
        tau = min(_select_tau(comp, x, a, eps), t_max - t)
        if not tau > 0:
            raise LeapFailureError(f"no admissible leap at t={t!r}")
        rates = a
        if midpoint:
            drift = [0.0] * comp.m
            for r, ar in enumerate(a):
                for i, d in gamma_rows[r]:
                    drift[i] += d * ar
        for _ in range(MAX_HALVINGS + 1):
            if midpoint:
                xm = [max(xi + 0.5 * tau * di, 0.0) for xi, di in zip(x, drift)]
                rates = comp.all_propensities(xm)
            fired = [rng.poisson(ar * tau) if ar > 0 else 0 for ar in rates]
            new = list(x)
            for r, n in enumerate(fired):
                if n:
                    for i, d in gamma_rows[r]:
                        new[i] += n * d
            if min(new) >= 0:
                break
            tau *= 0.5
            halvings += 1
        else:
            a = comp.all_propensities(x)
            t_new, events, absorbed = _direct_steps(comp, x, a, t, t_max, rng, rec, FALLBACK_SSA_STEPS)
            fallbacks += 1
            if events == 0 and not absorbed and t_new < t_max:
                raise LeapFailureError(f"tau-leap fallback made no progress at t={t!r}")
            t = t_new
            if absorbed:
                break
            continue
        t_new = t + tau if t_max - (t + tau) > 1e-12 * max(1.0, abs(t_max)) else t_max
        rec.jump(t_new, x, new)
        x = new
        t = t_new
        leaps += 1
    rec.finish(x)
    times, counts = rec.arrays(comp.m)
    return JumpTrajectory(times, counts, net.species_names, seed, "tau-leap", absorbed,
                          {"leaps": leaps, "fallbacks": fallbacks, "halvings": halvings, "eps": eps,
                           "midpoint": midpoint})
