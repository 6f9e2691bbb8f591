"""Probabilistic content placement: each SBS caches the content w.p. c_f."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from cachecomp.geometry import PointSet


@dataclass(frozen=True)
class CachePartition:
    caching_in: PointSet
    noncaching_in: PointSet
    all_out: PointSet

    @property
    def kappa(self):
        return self.caching_in.count


def caching_count_pmf(kappa, p):
    """Poisson law of the number of in-cluster SBSs holding the content."""
    return stats.poisson.pmf(kappa, p.mean_caching_count)


def thin_in_cluster(points, c_f, rng):
    """Independent thinning; returns (caching, noncaching) point sets."""
    r = points.horizontal_distances
    keep = rng.random(r.size) < c_f
    return PointSet(r[keep]), PointSet(r[~keep])
