"""Adaptive integrators for the induced kinetic differential equation.

Two methods are available:

``explicit-adaptive``
    Dormand-Prince 5(4) with local extrapolation, PI step-size control and
    the usual quartic continuous extension for dense output.

``stiff``
    The three-stage, L-stable Rosenbrock method ROS3 (order 3, embedded
    order 2), linearly implicit in the analytic Jacobian.  Dense output
    is cubic Hermite between accepted steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.linalg import lu_factor, lu_solve
from scipy.sparse.linalg import splu

from ..errors import MaxStepsExceededError, NegativeConcentrationError, StepSizeUnderflowError
from ..network import ReactionNetwork
from .kinetics import MassAction

METHODS = ("explicit-adaptive", "stiff")

# Dormand-Prince tableau
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
# difference between the 5th and embedded 4th order weights
_E = np.array([71 / 57600, 0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# continuous extension: y(t + theta h) = y + h K^T (P @ [theta, theta^2, theta^3, theta^4])
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

# ROS3 (Sandu et al. 1997), stage coefficients in the A/C/M/E form
_ROS3_GAMMA = 0.43586652150845899941601945119356
_ROS3_A = {(1, 0): 1.0, (2, 0): 1.0, (2, 1): 0.0}
_ROS3_C = {(1, 0): -1.0156171083877702091975600115545,
           (2, 0): 4.0759956452537699824805835358067,
           (2, 1): 9.2076794298330791242156818474003}
_ROS3_M = np.array([1.0, 6.1697947043828245592553615689730, -0.42772256543218573326238373806514])
_ROS3_E = np.array([0.5, -2.9079558716805469821718236208017, 0.22354069897811569627360909276199])


@dataclass
class OdeTrajectory:
    times: np.ndarray
    states: np.ndarray              # len(times) x M
    species: tuple[str, ...]
    method: str
    rtol: float
    atol: float
    n_accepted: int = 0
    n_rejected: int = 0
    n_rhs: int = 0
    n_jac: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, sep: str = ",") -> str:
        lines = [sep.join(["t", *self.species])]
        for t, row in zip(self.times, self.states):
            lines.append(sep.join(f"{v:.17g}" for v in (t, *row)))
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "species": list(self.species),
            "times": [float(t) for t in self.times],
            "states": [[float(v) for v in row] for row in self.states],
            "metadata": {"method": self.method, "rtol": self.rtol, "atol": self.atol,
                         "accepted": self.n_accepted, "rejected": self.n_rejected,
                         "rhs_evaluations": self.n_rhs, "jacobian_evaluations": self.n_jac},
        }


def _norm(err, y0, y1, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


class _Sampler:
    """Collects dense output at requested times as steps are accepted."""

    def __init__(self, t0, t1, samples, m):
        self.record_steps = samples is None
        if self.record_steps:
            self.grid = None
        elif np.isscalar(samples):
            n = int(samples)
            if n < 2:
                raise ValueError("samples must be at least 2")
            self.grid = np.linspace(t0, t1, n)
        else:
            self.grid = np.asarray(samples, dtype=float)
            if np.any(np.diff(self.grid) <= 0) or self.grid[0] < t0 or self.grid[-1] > t1:
                raise ValueError("sample times must increase strictly inside the span")
        self.times: list[float] = []
        self.states: list[np.ndarray] = []
        self.pos = 0

    def start(self, t0, y0):
        if self.record_steps:
            self.times.append(t0)
            self.states.append(y0.copy())
        else:
            while self.pos < len(self.grid) and self.grid[self.pos] <= t0:
                self.times.append(float(self.grid[self.pos]))
                self.states.append(y0.copy())
                self.pos += 1

    def step(self, t, t_end, y_new, interp):
        """Record samples in ``(t, t_end]``; ``t_end`` may be snapped onto the span end."""
        if self.record_steps:
            self.times.append(t_end)
            self.states.append(y_new.copy())
            return
        h = t_end - t
        while self.pos < len(self.grid) and self.grid[self.pos] <= t_end:
            ts = self.grid[self.pos]
            self.times.append(float(ts))
            self.states.append(y_new.copy() if ts == t_end else interp(min((ts - t) / h, 1.0)))
            self.pos += 1

    def result(self):
        if self.grid is not None and self.pos != len(self.grid):
            raise RuntimeError("sample grid not covered by the integration")
        return np.array(self.times), np.array(self.states)


def _initial_step(f, t0, y0, f0, order, rtol, atol, span):
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    f1 = f(y0 + h0 * f0)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / (order + 1))
    return min(100 * h0, h1, span)


def integrate(net: ReactionNetwork, k, c0, t_span, *, rtol: float = 1e-8, atol: float = 1e-10,
              method: str = "explicit-adaptive", max_steps: int = 200_000, samples=None,
              first_step: float | None = None, max_step: float | None = None,
              kinetics: MassAction | None = None) -> OdeTrajectory:
    """Integrate the mass-action ODE over ``t_span = (t0, t1)``.

    ``samples`` may be ``None`` (return every accepted step), an integer
    (that many equally spaced times including both ends) or an increasing
    array of times.  Steps that would push a concentration below
    ``-10 * atol`` are rejected and retried with a smaller step.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    t0, t1 = map(float, t_span)
    if not t1 > t0:
        raise ValueError("t_span must satisfy t1 > t0")
    y0 = np.asarray(c0, dtype=float).copy()
    if y0.shape != (net.n_species,):
        raise ValueError(f"expected {net.n_species} initial concentrations")
    if np.any(y0 < 0):
        raise NegativeConcentrationError("initial concentrations must be nonnegative")
    kin = kinetics or MassAction(net, k)
    sampler = _Sampler(t0, t1, samples, net.n_species)
    stepper = _dopri5 if method == "explicit-adaptive" else _ros3
    stats = stepper(kin, t0, t1, y0, rtol, atol, max_steps, sampler, first_step, max_step)
    times, states = sampler.result()
    return OdeTrajectory(times, states, net.species_names, method, rtol, atol, **stats)


def _advance(t, h, t1):
    """``t + h``, snapped onto ``t1`` when within rounding of it."""
    return t + h if t1 - (t + h) > 1e-14 * max(1.0, abs(t1)) else t1


def _controller_limits(h, t, t1, max_step):
    h = min(h, t1 - t)
    if max_step is not None:
        h = min(h, max_step)
    return h


def _dopri5(kin, t0, t1, y0, rtol, atol, max_steps, sampler, first_step, max_step):
    f = kin.rhs
    neg_floor = -10 * atol
    safe, beta = 0.9, 0.04
    expo1 = 0.2 - 0.75 * beta
    facmin, facmax = 0.2, 10.0
    t, y = t0, y0
    f0 = f(y)
    n_rhs = 1
    h = first_step or _initial_step(f, t0, y, f0, 4, rtol, atol, t1 - t0)
    n_rhs += 0 if first_step else 1
    sampler.start(t, y)
    facold = 1e-4
    accepted = rejected = 0
    last_rejected = False
    K = np.empty((7, y.size))
    while t < t1:
        if accepted + rejected >= max_steps:
            raise MaxStepsExceededError(t, max_steps)
        h = _controller_limits(h, t, t1, max_step)
        if h <= 16 * np.finfo(float).eps * max(abs(t), 1.0):
            raise StepSizeUnderflowError(t, h)
        K[0] = f0
        for s in range(1, 7):
            K[s] = f(y + h * (np.dot(_A[s], K[:s])))
        n_rhs += 6
        y_new = y + h * (_B @ K)
        err = _norm(h * (_E @ K), y, y_new, rtol, atol)
        negative = y_new.min(initial=0.0) < neg_floor
        if err <= 1.0 and not negative:
            fac11 = err ** expo1
            fac = fac11 / facold ** beta
            fac = min(1 / facmin, max(1 / facmax, fac / safe))
            h_new = h / fac
            if last_rejected:
                h_new = min(h_new, h)
            facold = max(err, 1e-4)
            Kc = K.copy()
            yc, hc = y.copy(), h
            t_next = _advance(t, h, t1)
            sampler.step(t, t_next, y_new, lambda th, Kc=Kc, yc=yc, hc=hc:
                         yc + hc * (Kc.T @ (_P @ np.array([th, th**2, th**3, th**4]))))
            t = t_next
            y, f0 = y_new, K[6].copy()      # first same as last
            accepted += 1
            last_rejected = False
            h = h_new
        else:
            rejected += 1
            last_rejected = True
            if negative and err <= 1.0:
                h *= 0.5
            else:
                h = h / min(1 / facmin, err ** expo1 / safe)
    return {"n_accepted": accepted, "n_rejected": rejected, "n_rhs": n_rhs, "n_jac": 0}


class _Linear:
    """Factorisation of ``I/(h gamma) - J`` (dense LU or sparse LU)."""

    def __init__(self, J, shift):
        if sparse.issparse(J):
            n = J.shape[0]
            self._lu = splu((sparse.identity(n, format="csc") * shift - J).tocsc())
            self.solve = self._lu.solve
        else:
            n = J.shape[0]
            self._lu = lu_factor(np.eye(n) * shift - J)
            self.solve = lambda b: lu_solve(self._lu, b)


def _ros3(kin, t0, t1, y0, rtol, atol, max_steps, sampler, first_step, max_step):
    f = kin.rhs
    use_sparse = kin.n_species > 64
    jac = kin.jacobian_sparse if use_sparse else kin.jacobian
    neg_floor = -10 * atol
    t, y = t0, y0
    f0 = f(y)
    n_rhs, n_jac = 1, 0
    h = first_step or _initial_step(f, t0, y, f0, 2, rtol, atol, t1 - t0)
    sampler.start(t, y)
    accepted = rejected = 0
    last_rejected = False
    J = None
    elo = 3.0
    while t < t1:
        if accepted + rejected >= max_steps:
            raise MaxStepsExceededError(t, max_steps)
        h = _controller_limits(h, t, t1, max_step)
        if h <= 16 * np.finfo(float).eps * max(abs(t), 1.0):
            raise StepSizeUnderflowError(t, h)
        if J is None:
            J = jac(y)
            n_jac += 1
        lin = _Linear(J, 1.0 / (h * _ROS3_GAMMA))
        k1 = lin.solve(f0)
        y2 = y + _ROS3_A[1, 0] * k1
        f2 = f(y2)
        n_rhs += 1
        k2 = lin.solve(f2 + (_ROS3_C[1, 0] / h) * k1)
        # third stage reuses f2 (a31 = a21, a32 = 0)
        k3 = lin.solve(f2 + (_ROS3_C[2, 0] / h) * k1 + (_ROS3_C[2, 1] / h) * k2)
        y_new = y + _ROS3_M[0] * k1 + _ROS3_M[1] * k2 + _ROS3_M[2] * k3
        err_vec = _ROS3_E[0] * k1 + _ROS3_E[1] * k2 + _ROS3_E[2] * k3
        err = max(_norm(err_vec, y, y_new, rtol, atol), 1e-10)
        negative = y_new.min(initial=0.0) < neg_floor
        fac = min(6.0, max(0.2, 0.9 * err ** (-1.0 / elo)))
        if err <= 1.0 and not negative:
            f_new = f(y_new)
            n_rhs += 1
            yc, fc0, fc1, hc = y.copy(), f0.copy(), f_new.copy(), h
            t_next = _advance(t, h, t1)
            sampler.step(t, t_next, y_new, lambda th, yc=yc, y1=y_new.copy(), fc0=fc0, fc1=fc1, hc=hc:
                         _hermite(th, yc, y1, fc0, fc1, hc))
            t = t_next
            y, f0 = y_new, f_new
            J = None
            accepted += 1
            h_new = h * fac
            if last_rejected:
                h_new = min(h_new, h)
            last_rejected = False
            h = h_new
        else:
            rejected += 1
            last_rejected = True
            h = h * (0.5 if negative and err <= 1.0 else fac)
    return {"n_accepted": accepted, "n_rejected": rejected, "n_rhs": n_rhs, "n_jac": n_jac}


def _hermite(th, y0, y1, f0, f1, h):
    h00 = 2 * th**3 - 3 * th**2 + 1
    h10 = th**3 - 2 * th**2 + th
    h01 = -2 * th**3 + 3 * th**2
    h11 = th**3 - th**2
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1
