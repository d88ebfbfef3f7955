"""Random streams with a documented, platform-stable construction.

A stream seeded with the integer ``s`` is numpy's ``PCG64`` bit generator
initialised from ``SeedSequence(s)``.  Uniforms are the generator's
53-bit doubles in ``[0, 1)``; every other variate is derived from them
here rather than through numpy's distribution code, so the sequence of
variates only depends on PCG64 and SeedSequence, both of which numpy
freezes.

* exponential: inverse CDF, ``-log(1 - u) / rate``;
* Poisson: sequential inversion for means below 10, otherwise Hormann's
  transformed rejection with squeeze (PTRS).
"""

from __future__ import annotations

import math

import numpy as np

POISSON_INVERSION_LIMIT = 10.0
_BLOCK = 1024


def child_seed(master_seed: int, index: int) -> int:
    """64-bit seed of run ``index`` derived from ``master_seed`` (counter-based)."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])


class RandomStream:
    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed)))
        self._buf = self._gen.random(_BLOCK).tolist()
        self._pos = 0

    def uniform(self) -> float:
        if self._pos == _BLOCK:
            # drawing in blocks yields the same values as drawing one at a time
            self._buf = self._gen.random(_BLOCK).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def exponential(self, rate: float) -> float:
        return -math.log(1.0 - self.uniform()) / rate

    def poisson(self, mean: float) -> int:
        if mean < 0 or not math.isfinite(mean):
            raise ValueError(f"invalid Poisson mean {mean!r}")
        if mean == 0:
            return 0
        if mean < POISSON_INVERSION_LIMIT:
            return self._poisson_inversion(mean)
        return self._poisson_ptrs(mean)

    def _poisson_inversion(self, mean: float) -> int:
        u = self.uniform()
        p = math.exp(-mean)
        cdf = p
        k = 0
        while u > cdf and k < 1000:
            k += 1
            p *= mean / k
            cdf += p
        return k

    def _poisson_ptrs(self, mean: float) -> int:
        slam = math.sqrt(mean)
        loglam = math.log(mean)
        b = 0.931 + 2.53 * slam
        a = -0.059 + 0.02483 * b
        invalpha = 1.1239 + 1.1328 / (b - 3.4)
        vr = 0.9277 - 3.6224 / (b - 2)
        while True:
            u = self.uniform() - 0.5
            v = self.uniform()
            us = 0.5 - abs(u)
            if us == 0.0 or v == 0.0:
                continue
            k = math.floor((2 * a / us + b) * u + mean + 0.43)
            if us >= 0.07 and v <= vr:
                return k
            if k < 0 or (us < 0.013 and v > us):
                continue
            if (math.log(v) + math.log(invalpha) - math.log(a / (us * us) + b)
                    <= -mean + k * loglam - math.lgamma(k + 1)):
                return k
