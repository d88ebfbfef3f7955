"""Reproducible ensembles of stochastic trajectories."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import CrnError
from ..network import ReactionNetwork
from .rng import child_seed
from .simulate import ssa_direct, tau_leap


@dataclass
class EnsembleStats:
    times: np.ndarray
    sample_means: np.ndarray        # len(times) x M
    sample_variances: np.ndarray    # len(times) x M, unbiased (zero when n_runs == 1)
    n_runs: int
    master_seed: int
    method: str
    species: tuple[str, ...] = ()

    def standard_errors(self) -> np.ndarray:
        return np.sqrt(self.sample_variances / self.n_runs)

    def to_json(self) -> dict:
        return {"species": list(self.species), "times": self.times.tolist(),
                "means": self.sample_means.tolist(), "variances": self.sample_variances.tolist(),
                "n_runs": self.n_runs, "master_seed": self.master_seed, "method": self.method}


class EnsembleRunError(CrnError):
    def __init__(self, run: int, cause: Exception):
        self.run = run
        self.exit_code = getattr(cause, "exit_code", 4)
        super().__init__(f"run {run} failed: {cause}")


def _run_one(args):
    net, k, x0, t_max, method, eps, master_seed, index, times = args
    seed = child_seed(master_seed, index)
    try:
        if method == "direct":
            traj = ssa_direct(net, k, x0, t_max, seed, sample_times=times)
        else:
            traj = tau_leap(net, k, x0, t_max, eps, seed, sample_times=times)
    except Exception as exc:       # re-raised with the run index attached
        raise EnsembleRunError(index, exc) from exc
    return traj.counts


def default_workers() -> int:
    env = os.environ.get("CRNKIT_THREADS")
    return max(1, int(env)) if env else 1


def ensemble(net: ReactionNetwork, k, x0, t_max: float, *, method: str = "direct", n: int = 100,
             master_seed: int = 0, sample_times=None, eps: float = 0.03,
             workers: int | None = None) -> EnsembleStats:
    """Run ``n`` independent trajectories and summarise them at ``sample_times``.

    Run ``i`` uses the seed ``child_seed(master_seed, i)``, so each run can
    be replayed on its own.  Per-run samples are gathered in run order
    before averaging, which makes the statistics bit-identical for any
    number of worker processes.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if method not in ("direct", "tau-leap", "tau"):
        raise ValueError("method must be 'direct' or 'tau-leap'")
    method = "tau-leap" if method == "tau" else method
    times = np.linspace(0.0, t_max, 11) if sample_times is None else np.asarray(sample_times, dtype=float)
    jobs = [(net, k, x0, t_max, method, eps, master_seed, i, times) for i in range(n)]
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1:
        results = [_run_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs, chunksize=max(1, n // (4 * workers))))
    data = np.stack(results).astype(float)          # n x T x M
    means = data.mean(axis=0)
    variances = data.var(axis=0, ddof=1) if n > 1 else np.zeros_like(means)
    return EnsembleStats(times, means, variances, n, master_seed, method, net.species_names)
