"""Monte Carlo SIR and coverage for the four transmission schemes.

Each trial samples one world: the in-cluster PPP thinned into caching servers
and non-caching interferers, the out-of-cluster PPP out to ``r_sim_window``,
independent LoS states and Nakagami fading for every link. Interferers beyond
the window are too many to draw individually and too strong in aggregate to
drop (LoS main-lobe gain with alpha_los close to 2), so their total power is
drawn as one Gamma variable with the exact mean and variance of the remote
shot noise.

Trial ``t`` always draws from ``substream(seed, 0, t)`` and positions are
drawn before link states, so the aerial schemes share worlds and the ground
user sees the same SBS layout.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import stats

from cachecomp.analytic import moment_match_gamma
from cachecomp.caching import thin_in_cluster
from cachecomp.channel import antenna_gain, los_probability, sample_links
from cachecomp.geometry import PointSet, sample_bpp_disk, sample_ppp_annulus
from cachecomp.quadrature import power_tail, radial_field
from cachecomp.rng import substream


class Scheme(str, enum.Enum):
    COMP_EXACT = "comp-exact"
    COMP_CAUCHY = "comp-cauchy"
    NEAREST_SBS = "nearest-sbs"
    GROUND_USER = "ground-user"


AERIAL = (Scheme.COMP_EXACT, Scheme.COMP_CAUCHY, Scheme.NEAREST_SBS)


@dataclass(frozen=True)
class SirSample:
    scheme: Scheme
    sir: float
    kappa: int
    desired_power: float
    interference_power: float


@dataclass(frozen=True)
class CoverageEstimate:
    p_hat: float
    n_trials: int
    ci_low: float
    ci_high: float
    threshold: float


def wilson_interval(k, n, confidence=0.95):
    ci = stats.binomtest(int(k), int(n)).proportion_ci(confidence, method="wilson")
    return float(ci.low), float(ci.high)


def coverage_from_sir(sir, theta):
    sir = np.asarray(sir)
    k = int(np.count_nonzero(sir > theta))
    lo, hi = wilson_interval(k, sir.size)
    p_hat = k / sir.size
    return CoverageEstimate(p_hat, sir.size, min(lo, p_hat), max(hi, p_hat), theta)


@dataclass(frozen=True)
class FarField:
    """Mean and variance of interference from beyond the simulation window."""

    mean: float
    var: float

    def sample(self, rng):
        if self.mean <= 0:
            return 0.0
        shape = self.mean**2 / self.var
        return rng.gamma(shape, self.var / self.mean)


@lru_cache(maxsize=32)
def far_field(p, h_rx=None):
    h = p.h_ue if h_rx is None else h_rx
    m = p.m_nakagami
    lo, hi = p.numerics.r_sim_window, p.numerics.v_max
    f = radial_field(p, lo, hi, p.lambda_out_m2, h)
    e1 = p.eta_spread
    e2 = p.eta_spread**2 * (m + 1) / m
    mean = e1 * p.p_tx * f.mean_sum(f.zeta_los, f.zeta_nlos)
    var = e2 * p.p_tx**2 * f.mean_sum(f.zeta_los**2, f.zeta_nlos**2)
    # beyond v_max: power-law tails, LoS weighted by P_l(v_max) as an upper bound
    g = float(antenna_gain(hi, p, h))
    pl = float(los_probability(hi, p, h))
    dh = h - p.h_sbs
    lam2pi = 2 * math.pi * p.lambda_out_m2
    mean += e1 * p.p_tx * g * lam2pi * (
        power_tail(p.a_nlos, p.alpha_nlos, hi, dh) + pl * power_tail(p.a_los, p.alpha_los, hi, dh)
    )
    var += e2 * (p.p_tx * g) ** 2 * lam2pi * (
        power_tail(p.a_nlos**2, 2 * p.alpha_nlos, hi, dh) + pl * power_tail(p.a_los**2, 2 * p.alpha_los, hi, dh)
    )
    return FarField(mean, var)


@dataclass
class World:
    """One sampled network around the user; arrays are per-link."""

    kappa: int
    r: np.ndarray
    zeta: np.ndarray
    gamma: np.ndarray
    is_los: np.ndarray
    far_power: float
    n_noncaching: int = 0
    params: object = field(default=None, repr=False)

    @property
    def servers(self):
        return slice(0, self.kappa)

    @property
    def interferers(self):
        return slice(self.kappa, None)


def sample_world(p, rng, r_servers=None):
    """Draw positions, then links. ``r_servers`` fixes the caching set (conditional runs)."""
    w = p.numerics.r_sim_window
    if r_servers is None:
        n_in = rng.poisson(p.lambda_b_m2 * math.pi * p.r_cluster**2)
        inside = sample_bpp_disk(n_in, p.r_cluster, rng)
        caching, noncaching = thin_in_cluster(inside, p.c_f, rng)
    else:
        caching = PointSet(np.asarray(r_servers, dtype=float))
        noncaching = sample_ppp_annulus(p.lambda_noncaching_m2, 0.0, p.r_cluster, rng)
    out = sample_ppp_annulus(p.lambda_out_m2, p.r_cluster, w, rng)
    r = np.concatenate([caching.horizontal_distances, noncaching.horizontal_distances, out.horizontal_distances])
    links = sample_links(r, p, rng)
    return World(
        kappa=caching.count,
        r=r,
        zeta=links.zeta,
        gamma=links.pow_fading,
        is_los=links.is_los,
        far_power=far_field(p).sample(rng),
        n_noncaching=noncaching.count,
        params=p,
    )


def world_sir(world, scheme):
    """SirSample for an aerial scheme on a sampled world."""
    p = world.params
    k = world.kappa
    rx = world.zeta * world.gamma * p.p_tx
    interference = float(np.sum(rx[k:])) + world.far_power
    if k == 0:
        return SirSample(scheme, 0.0, 0, 0.0, interference)
    if scheme in (Scheme.COMP_EXACT, Scheme.GROUND_USER):
        desired = p.p_tx * float(np.sum(np.sqrt(world.zeta[:k] * world.gamma[:k]))) ** 2
    elif scheme == Scheme.COMP_CAUCHY:
        desired = k * float(np.sum(rx[:k]))
    elif scheme == Scheme.NEAREST_SBS:
        i = int(np.argmin(world.r[:k]))
        desired = float(rx[i])
        interference += float(np.sum(rx[:k])) - desired
    else:
        raise ValueError(scheme)
    return SirSample(scheme, desired / interference, k, desired, interference)


def _receiver_params(p, scheme):
    return p.for_ground_user() if scheme == Scheme.GROUND_USER else p


def simulate_realization(p, scheme, rng):
    scheme = Scheme(scheme)
    return world_sir(sample_world(_receiver_params(p, scheme), rng), scheme)


def _simulate_chunk(args):
    p, schemes, seed, start, stop, r_servers = args
    schemes = [Scheme(s) for s in schemes]
    out = {s: np.empty(stop - start) for s in schemes}
    aerial = [s for s in schemes if s != Scheme.GROUND_USER]
    for i, t in enumerate(range(start, stop)):
        if aerial:
            world = sample_world(p, substream(seed, 0, t), r_servers)
            for s in aerial:
                out[s][i] = world_sir(world, s).sir
        if Scheme.GROUND_USER in out:
            world = sample_world(p.for_ground_user(), substream(seed, 0, t), r_servers)
            out[Scheme.GROUND_USER][i] = world_sir(world, Scheme.GROUND_USER).sir
    return out


def simulate_sir(p, schemes, n_trials=None, seed=None, workers=1, r_servers=None, chunk=2048):
    """SIR arrays per scheme; identical for any ``workers``."""
    n_trials = p.numerics.n_trials if n_trials is None else n_trials
    seed = p.numerics.rng_seed if seed is None else seed
    schemes = tuple(Scheme(s) for s in ([schemes] if isinstance(schemes, (str, Scheme)) else schemes))
    r_servers = None if r_servers is None else tuple(float(x) for x in r_servers)
    tasks = [
        (p, tuple(s.value for s in schemes), seed, a, min(a + chunk, n_trials), r_servers)
        for a in range(0, n_trials, chunk)
    ]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_simulate_chunk, tasks))
    else:
        parts = [_simulate_chunk(t) for t in tasks]
    return {s: np.concatenate([part[s] for part in parts]) for s in schemes}


def estimate_coverage(p, scheme, theta=None, n_trials=None, seed=None, workers=1):
    """Fraction of trials with SIR strictly above ``theta`` and its Wilson 95% interval."""
    if n_trials is not None and n_trials < 100:
        raise ValueError("need at least 100 trials")
    theta = p.sir_threshold if theta is None else theta
    sir = simulate_sir(p, [scheme], n_trials, seed, workers)[Scheme(scheme)]
    return coverage_from_sir(sir, theta)


def coverage_curve(p, scheme, thetas, n_trials=None, seed=None, workers=1):
    """Coverage at several thresholds from one set of simulated worlds."""
    sir = simulate_sir(p, [scheme], n_trials, seed, workers)[Scheme(scheme)]
    return [coverage_from_sir(sir, t) for t in thetas]


@dataclass(frozen=True)
class GainPdf:
    bin_edges: np.ndarray
    empirical_density: np.ndarray
    matched_density: np.ndarray
    ks_distance: float
    ks_pvalue: float
    approx: object
    r_servers: np.ndarray
    is_los: np.ndarray

    @property
    def bin_centers(self):
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])


def reference_servers(p, seed, min_kappa=2, max_tries=10_000):
    """Server distances and LoS states of the first seeded world with >= min_kappa servers."""
    for t in range(max_tries):
        world = sample_world(p, substream(seed, 2, t))
        if world.kappa >= min_kappa:
            k = world.kappa
            return world.r[:k].copy(), world.is_los[:k].copy(), world.zeta[:k].copy()
    raise RuntimeError("no world with enough servers; check lambda_b, c_f, r_cluster")


def empirical_gain_pdf(p, n_realizations, bins=60, seed=None, zetas=None, min_kappa=2):
    """Distribution of the summed server power gain sum_i zeta_i omega_i^2 vs its matched Gamma.

    Geometry and LoS states are frozen (one network realization); only the
    fading is redrawn ``n_realizations`` times.
    """
    if n_realizations < 1:
        raise ValueError("need at least one realization")
    seed = p.numerics.rng_seed if seed is None else seed
    if zetas is None:
        r, los, zetas = reference_servers(p, seed, min_kappa)
    else:
        zetas = np.asarray(zetas, dtype=float)
        r, los = np.full(zetas.size, np.nan), np.zeros(zetas.size, dtype=bool)
    rng = substream(seed, 3)
    g = rng.gamma(p.m_nakagami, p.eta_spread / p.m_nakagami, (n_realizations, zetas.size))
    samples = g @ zetas
    approx = moment_match_gamma(zetas, p)
    dist = stats.gamma(approx.k_eq, scale=approx.theta)
    hi = np.quantile(samples, 0.999)
    edges = np.linspace(0.0, hi, bins + 1)
    dens, _ = np.histogram(samples, bins=edges, density=False)
    dens = dens / (n_realizations * np.diff(edges))
    ks = stats.kstest(samples, dist.cdf)
    centers = 0.5 * (edges[1:] + edges[:-1])
    return GainPdf(edges, dens, dist.pdf(centers), float(ks.statistic), float(ks.pvalue), approx, r, los)
