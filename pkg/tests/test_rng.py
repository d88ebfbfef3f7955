import math

import numpy as np
import pytest
from scipy import stats

from crnkit.stochastic import RandomStream, child_seed


def test_uniforms_are_pcg64_doubles():
    ref = np.random.Generator(np.random.PCG64(np.random.SeedSequence(42))).random(3000)
    s = RandomStream(42)
    assert [s.uniform() for _ in range(3000)] == ref.tolist()


def test_exponential_is_inverse_cdf():
    ref = np.random.Generator(np.random.PCG64(np.random.SeedSequence(7))).random(5)
    s = RandomStream(7)
    assert [s.exponential(2.0) for _ in range(5)] == [-math.log(1 - u) / 2.0 for u in ref]


def test_child_seeds_distinct_and_stable():
    seeds = [child_seed(123, i) for i in range(1000)]
    assert len(set(seeds)) == 1000
    assert seeds[0] == child_seed(123, 0)
    assert child_seed(123, 0) != child_seed(124, 0)


def test_negative_seed_rejected():
    with pytest.raises(ValueError):
        RandomStream(-1)


@pytest.mark.parametrize("mean", [0.3, 3.0, 9.5, 10.0, 50.0, 1e4])
def test_poisson_distribution(mean):
    s = RandomStream(int(mean * 10))
    n = 20000
    x = np.array([s.poisson(mean) for _ in range(n)])
    assert x.min() >= 0
    assert abs(x.mean() - mean) <= 5 * math.sqrt(mean / n)
    assert x.var(ddof=1) == pytest.approx(mean, rel=0.06)
    # chi-square goodness of fit on the central bins
    lo, hi = stats.poisson.ppf([0.005, 0.995], mean).astype(int)
    edges = np.arange(lo, hi + 2)
    observed = np.histogram(np.clip(x, lo, hi), bins=edges)[0]
    expected = np.diff(np.concatenate([[0.0], stats.poisson.cdf(edges[1:-1] - 1, mean), [1.0]])) * n
    keep = expected > 5
    chi2 = ((observed[keep] - expected[keep]) ** 2 / expected[keep]).sum()
    assert stats.chi2.sf(chi2, keep.sum() - 1) > 1e-4


def test_poisson_edge_cases():
    s = RandomStream(0)
    assert s.poisson(0.0) == 0
    with pytest.raises(ValueError):
        s.poisson(-1.0)
    with pytest.raises(ValueError):
        s.poisson(float("nan"))
