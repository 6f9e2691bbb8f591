"""Spatial layout around the typical aerial user.

Everything downstream depends only on horizontal distance from the user's
ground projection, so point sets are stored as distance arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PointSet:
    horizontal_distances: np.ndarray

    @property
    def count(self):
        return int(self.horizontal_distances.size)

    def __len__(self):
        return self.count

    @classmethod
    def empty(cls):
        return cls(np.empty(0))


def sample_bpp_disk(kappa, r_c, rng):
    """``kappa`` i.i.d. uniform points in a disk of radius ``r_c`` (density 2r/r_c^2)."""
    if kappa < 0 or r_c <= 0:
        raise ValueError("need kappa >= 0 and r_c > 0")
    return PointSet(r_c * np.sqrt(rng.random(int(kappa))))


def sample_ppp_annulus(intensity, r_in, r_out, rng):
    """Homogeneous PPP of ``intensity`` points/m^2 restricted to r_in < r <= r_out."""
    if not 0 <= r_in < r_out or intensity < 0:
        raise ValueError("need 0 <= r_in < r_out and intensity >= 0")
    area = math.pi * (r_out**2 - r_in**2)
    n = rng.poisson(intensity * area)
    u = rng.random(n)
    # inverse CDF of 2r/(r_out^2 - r_in^2); 1-u keeps r strictly above r_in
    return PointSet(np.sqrt(r_in**2 + (1.0 - u) * (r_out**2 - r_in**2)))


def link_distance(r, h_ue, h_sbs):
    return np.hypot(r, h_ue - h_sbs)
