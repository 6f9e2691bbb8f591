"""Ground-to-air link model: antenna pattern, blockage, path gain, fading.

All deterministic functions accept scalars or arrays of horizontal distance
``r`` (m). ``h_rx`` defaults to the aerial altitude ``p.h_ue``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from cachecomp.geometry import link_distance


@dataclass(frozen=True)
class LinkState:
    """A batch of links; fields are parallel arrays."""

    is_los: np.ndarray
    r: np.ndarray
    zeta: np.ndarray
    amp_fading: np.ndarray

    @property
    def pow_fading(self):
        return self.amp_fading**2


def _rx(p, h_rx):
    return p.h_ue if h_rx is None else h_rx


def mainlobe_window(r, p):
    """Altitude interval (lo, hi) covered by the down-tilted main lobe at distance r."""
    tilt, beam = math.radians(p.theta_tilt), math.radians(p.theta_beam)
    r = np.asarray(r, dtype=float)
    return p.h_sbs - r * math.tan(tilt + beam / 2), p.h_sbs - r * math.tan(tilt - beam / 2)


def antenna_gain(r, p, h_rx=None):
    lo, hi = mainlobe_window(r, p)
    h = _rx(p, h_rx)
    g = np.where((lo < h) & (h < hi), p.g_main, p.g_side)
    return g if g.ndim else float(g)


def gain_switch_distances(p, h_rx=None):
    """Horizontal distances where the main-lobe membership of ``h_rx`` can change."""
    tilt, beam = math.radians(p.theta_tilt), math.radians(p.theta_beam)
    dh = p.h_sbs - _rx(p, h_rx)
    out = []
    for ang in (tilt + beam / 2, tilt - beam / 2):
        t = math.tan(ang)
        if t != 0 and dh / t > 0:
            out.append(dh / t)
    return sorted(out)


def path_gain(r, is_los, p, h_rx=None):
    """Composite antenna gain times path loss, A_v G(r) d^-alpha_v."""
    h = _rx(p, h_rx)
    d = link_distance(np.asarray(r, dtype=float), h, p.h_sbs)
    if np.any(d < 1.0):
        raise ValueError("link distance below the 1 m reference distance")
    los = np.asarray(is_los, dtype=bool)
    pl = np.where(los, p.a_los * d ** (-p.alpha_los), p.a_nlos * d ** (-p.alpha_nlos))
    z = pl * antenna_gain(r, p, h)
    return z if np.ndim(z) else float(z)


def buildings_crossed(r, p):
    return np.floor(np.asarray(r, dtype=float) * math.sqrt(p.bldg_area_fraction * p.bldg_density) / 1000.0).astype(np.int64)


@lru_cache(maxsize=64)
def _los_table(h_sbs, h_rx, c, den_m, n_max):
    # den_m: None -> (p + 1) denominator, else the literal (m + 1) value
    table = np.ones(n_max + 1)
    dh = h_rx - h_sbs
    for k in range(1, n_max + 1):
        n = np.arange(k)
        den = (k + 1) if den_m is None else den_m
        heights = h_sbs + dh * (n + 0.5) / den
        table[k] = math.exp(np.sum(np.log1p(-np.exp(-(heights**2) / (2 * c * c)))))
    table.flags.writeable = False
    return table


def los_table(p, n_max, h_rx=None):
    """P_l indexed by the number of buildings crossed, 0..n_max (at least)."""
    size = 64
    while size < n_max:
        size *= 2
    den_m = None if p.blockage_denominator == "p_plus_1" else p.m_nakagami + 1
    return _los_table(float(p.h_sbs), float(_rx(p, h_rx)), float(p.bldg_height_scale), den_m, size)


def los_probability(r, p, h_rx=None):
    """Building-blockage LoS probability; exactly 1 when no building is crossed."""
    k = buildings_crossed(r, p)
    table = los_table(p, int(np.max(k, initial=0)), h_rx)
    out = table[k]
    return out if out.ndim else float(out)


def sample_fading_power(m, eta, rng, size=None):
    """Nakagami-m power gain: Gamma(m, eta/m), mean eta."""
    return rng.gamma(m, eta / m, size)


def sample_nakagami_amplitude(m, eta, rng, size=None):
    return np.sqrt(sample_fading_power(m, eta, rng, size))


def nakagami_pdf(w, m, eta):
    w = np.asarray(w, dtype=float)
    mu = m / eta
    return 2 * mu**m * w ** (2 * m - 1) / math.gamma(m) * np.exp(-mu * w * w)


def sample_links(r, p, rng, h_rx=None, m=None):
    """LoS state and fading for every distance in ``r``, drawn independently."""
    m = p.m_nakagami if m is None else m
    r = np.asarray(r, dtype=float)
    is_los = rng.random(r.size) < los_probability(r, p, h_rx)
    zeta = path_gain(r, is_los, p, h_rx) if r.size else np.empty(0)
    amp = sample_nakagami_amplitude(m, p.eta_spread, rng, r.size)
    return LinkState(is_los, r, np.asarray(zeta, dtype=float), amp)
