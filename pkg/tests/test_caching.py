import math

import numpy as np
import pytest
from scipy import stats

from cachecomp.caching import caching_count_pmf, thin_in_cluster
from cachecomp.geometry import PointSet, sample_bpp_disk, sample_ppp_annulus


def test_pmf_no_caching(p):
    q = p.replace(c_f=0.0)
    assert caching_count_pmf(0, q) == 1.0
    assert all(caching_count_pmf(k, q) == 0.0 for k in range(1, 10))


def test_pmf_empty_cluster(p):
    assert caching_count_pmf(0, p) == pytest.approx(math.exp(-0.004 * math.pi * 20 * 1e-0 * 10), abs=1e-4)
    assert caching_count_pmf(0, p) == pytest.approx(0.0811, abs=1e-4)


def test_pmf_tail_below_kappa_max(p):
    k = np.arange(p.kappa_max + 1)
    assert 1 - caching_count_pmf(k, p).sum() < 1e-9


@pytest.mark.parametrize("c_f", [0.0, 1.0])
def test_thinning_extremes(rng, c_f):
    pts = sample_bpp_disk(500, 200.0, rng)
    c, n = thin_in_cluster(pts, c_f, rng)
    assert (c.count, n.count) == ((500, 0) if c_f == 1 else (0, 500))


def test_thinning_fraction(rng):
    pts = PointSet(np.zeros(10**6))
    c, n = thin_in_cluster(pts, 0.5, rng)
    assert c.count + n.count == 10**6
    assert c.count / 10**6 == pytest.approx(0.5, abs=0.002)


def _cluster_counts(p, n, seed):
    rng = np.random.default_rng(seed)
    kap = np.empty(n, dtype=int)
    for i in range(n):
        pts = sample_ppp_annulus(p.lambda_b_m2, 0.0, p.r_cluster, rng)
        kap[i] = thin_in_cluster(pts, p.c_f, rng)[0].count
    return kap


def test_cache_count_tv_distance(p):
    q = p.replace(c_f=0.6)
    kap = _cluster_counts(q, 10**5, 11)
    k = np.arange(kap.max() + 1)
    emp = np.bincount(kap, minlength=k.size) / kap.size
    tv = 0.5 * (np.abs(emp - caching_count_pmf(k, q)).sum() + (1 - caching_count_pmf(k, q).sum()))
    assert tv < 0.01


def test_thinned_ppp_counts_poisson(p):
    q = p.replace(c_f=0.4)
    rng = np.random.default_rng(12)
    counts = []
    for _ in range(20_000):
        pts = sample_ppp_annulus(q.lambda_b_m2, 0.0, 400.0, rng)
        c, _ = thin_in_cluster(pts, q.c_f, rng)
        counts.append(np.sum(c.horizontal_distances > 250.0))
    counts = np.array(counts)
    mu = q.c_f * q.lambda_b_m2 * math.pi * (400.0**2 - 250.0**2)
    k = np.arange(counts.max() + 1)
    obs = np.bincount(counts)
    exp = stats.poisson.pmf(k, mu) * counts.size
    exp[-1] += stats.poisson.sf(k[-1], mu) * counts.size
    # pool sparse bins
    keep = exp >= 5
    obs_p = np.append(obs[keep], obs[~keep].sum())
    exp_p = np.append(exp[keep], exp[~keep].sum())
    if exp_p[-1] == 0:
        obs_p, exp_p = obs_p[:-1], exp_p[:-1]
    assert stats.chisquare(obs_p, exp_p).pvalue > 0.01
