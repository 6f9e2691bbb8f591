"""Closed-form upper bound on the aerial user's coverage probability.

Pipeline, for kappa serving SBSs at distances r_1..r_kappa:

1. The Cauchy-Schwarz bound replaces the coherent power (sum Q_i)^2 by
   kappa * sum Q_i^2, a sum of Gamma(m, eta zeta_i / m) variables.
2. That sum is moment-matched to one Gamma(k_eq, theta), then the shape is
   raised to the integer m*kappa >= k_eq.
3. P(kappa J > theta_sir I) with integer shape is a finite series in the
   derivatives of the interference Laplace transform L(varpi).
4. Average over LoS/NLoS assignments of the servers, over the serving
   distances and over the Poisson number of caching SBSs.

Derivatives of L are never formed directly. Writing L = exp(S), the scaled
terms t_j = (-varpi)^j L^(j) / j! obey

    t_{n+1} = 1/(n+1) * sum_{i=0}^{n} u_{i+1} t_{n-i},
    u_j     = varpi^j |S^(j)| / (j-1)!,

and every t_j, u_j is non-negative, so the series sum_{j<k} t_j is a sum of
positive terms (no cancellation) and stays representable when L^(j) itself
under- or overflows.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special

from cachecomp.caching import caching_count_pmf
from cachecomp.channel import antenna_gain, los_probability, path_gain
from cachecomp.quadrature import power_tail, radial_field
from cachecomp.rng import substream


class AccuracyError(ArithmeticError):
    """A numerical error bound was exceeded."""


@dataclass(frozen=True)
class GammaApprox:
    k_eq: float
    k_int: int
    theta: float

    @property
    def mean(self):
        return self.k_eq * self.theta

    @property
    def var(self):
        return self.k_eq * self.theta**2


def moment_match_gamma(zetas, p, m=None):
    """Gamma(k_eq, theta) with the first two moments of sum_i zeta_i * Gamma(m, eta/m).

    k_int = m * kappa is the integer shape bound actually used in the series.
    """
    m = p.m_nakagami if m is None else m
    z = np.asarray(zetas, dtype=float)
    if z.size == 0 or np.any(z <= 0):
        raise ValueError("moment matching needs a nonempty list of positive gains")
    s1, s2 = math.fsum(z), math.fsum(z * z)
    return GammaApprox(k_eq=m * s1 * s1 / s2, k_int=m * z.size, theta=(p.eta_spread / m) * s2 / s1)


def gamma_ccdf_series(x, k_int, theta):
    """P(J > x) for J ~ Gamma(k_int, theta), integer k_int, as a finite Poisson sum."""
    if k_int < 1 or theta <= 0 or x < 0:
        raise ValueError("need k_int >= 1, theta > 0, x >= 0")
    y = x / theta
    if y == 0:
        return 1.0
    j = np.arange(k_int)
    logs = j * math.log(y) - y - special.gammaln(j + 1)
    return min(1.0, math.fsum(np.exp(logs)))


def _rising_over_factorial(m, n):
    # coef_j = (m)_j / (j-1)! = Gamma(m+j) / (Gamma(m) Gamma(j)), j = 1..n
    j = np.arange(1, n + 1)
    return np.exp(special.gammaln(m + j) - special.gammaln(m) - special.gammaln(j))


@dataclass(frozen=True)
class LaplaceEval:
    """Laplace transform of the aggregate interference and its derivatives at varpi.

    ``scaled[j]`` = (-varpi)^j L^(j)(varpi) / j!, all >= 0.
    ``values[j]`` = L^(j)(varpi); may under/overflow at high order.
    ``exponent_derivs[j]`` = S^(j)(varpi) with L = exp(S).
    """

    varpi: float
    values: np.ndarray
    exponent_derivs: np.ndarray
    scaled: np.ndarray
    error_bound: float = 0.0

    def series(self, k):
        if k > len(self.scaled):
            raise ValueError("not enough orders evaluated")
        return math.fsum(self.scaled[:k])


def _raw_from_scaled(varpi, scaled):
    j = np.arange(len(scaled))
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        mag = np.exp(np.log(scaled) + special.gammaln(j + 1) - j * math.log(varpi))
    return np.where(j % 2 == 0, 1.0, -1.0) * mag


def _series_terms(S, u, n):
    """t_0..t_n from L = exp(S) and scaled exponent derivatives u_1..u_n."""
    t = np.empty(n + 1)
    t[0] = math.exp(S)
    for k in range(n):
        t[k + 1] = math.fsum(u[: k + 1] * t[k::-1]) / (k + 1)
    return t


_X_SPLIT = 1e-3
_N_MOMENTS = 16


class InterferenceLaplace:
    """L(varpi) = E exp(-varpi I) for in-cluster (non-caching) plus out-of-cluster interferers.

    The PGFL integral is discretized by composite Gauss-Legendre rules up to
    ``v_max``; beyond it the NLoS contribution is added in closed form
    (linearized kernel, power-law path gain) and the neglected LoS part plus
    the linearization error are bounded.
    """

    def __init__(self, p, in_cluster_intensity_m2=None, h_rx=None, m=None):
        self.p = p
        self.m = p.m_nakagami if m is None else m
        h = p.h_ue if h_rx is None else h_rx
        lam_in = p.lambda_noncaching_m2 if in_cluster_intensity_m2 is None else in_cluster_intensity_m2
        lam_out = p.lambda_out_m2
        v_max = p.numerics.v_max
        fields = []
        if lam_in > 0:
            fields.append(radial_field(p, 0.0, p.r_cluster, lam_in, h))
        fields.append(radial_field(p, p.r_cluster, v_max, lam_out, h))
        f = fields[0] if len(fields) == 1 else fields[0] + fields[1]
        # interferer power P_t zeta gamma with gamma ~ Gamma(m, eta/m)
        eta = p.eta_spread
        c = np.concatenate([f.zeta_los, f.zeta_nlos]) * (eta * p.p_tx / self.m)
        w = np.concatenate([f.weight * f.p_los, f.weight * (1 - f.p_los)])
        keep = w > 0
        order = np.argsort(-c[keep])
        self.c, self.w = c[keep][order], w[keep][order]
        dh = h - p.h_sbs
        g_far = float(antenna_gain(v_max, p, h))
        # per-unit-varpi exponent of the NLoS tail beyond v_max
        self.tail_coef = power_tail(2 * math.pi * lam_out * eta * p.p_tx * p.a_nlos * g_far, p.alpha_nlos, v_max, dh)
        los_tail = power_tail(
            2 * math.pi * lam_out * eta * p.p_tx * p.a_los * g_far * float(los_probability(v_max, p, h)),
            p.alpha_los, v_max, dh,
        )
        self._err_coef = los_tail
        self._x_tail = eta * p.p_tx * float(path_gain(v_max, False, p, h)) / self.m
        self.n_nodes = self.c.size
        # Suffix moments sum_{k>=s} w_k c_k^q: nodes with c varpi < _X_SPLIT are
        # summed through the binomial series of the kernel instead of node by node.
        q = np.arange(_N_MOMENTS + 1)[:, None]
        with np.errstate(under="ignore", divide="ignore"):
            pw = self.w * self.c**q
            mom = np.concatenate([np.cumsum(pw[:, ::-1], axis=1)[:, ::-1], np.zeros((q.size, 1))], axis=1)
            self._log_mom = np.log(mom)
        qq = np.arange(_N_MOMENTS + 1)
        m = self.m
        # exponent: 1 - (1+x)^-m = sum_{q>=1} (-1)^(q+1) (m)_q / q! x^q
        a0 = np.where(qq % 2, 1.0, -1.0) * np.exp(special.gammaln(m + qq) - special.gammaln(m) - special.gammaln(qq + 1))
        a0[0] = 0.0
        # u_j: coef_j x^j (1+x)^(-m-j) = coef_j sum_q (-1)^q (m+j)_q / q! x^(j+q)
        coef = _rising_over_factorial(m, _N_MOMENTS)
        A = np.zeros((_N_MOMENTS, _N_MOMENTS + 1))
        for j in range(1, _N_MOMENTS + 1):
            q = np.arange(_N_MOMENTS - j + 1)
            A[j - 1, j + q] = coef[j - 1] * np.where(q % 2, -1.0, 1.0) * np.exp(
                special.gammaln(m + j + q) - special.gammaln(m + j) - special.gammaln(q + 1)
            )
        self._far_exp, self._far_u = a0, A

    def error_bound(self, varpi):
        """Bound on |S error| from truncation at v_max (LoS tail + kernel linearization)."""
        lin = 0.5 * (self.m + 1) * varpi * self._x_tail * varpi * self.tail_coef
        return varpi * self._err_coef + lin

    def _split(self, varpi, direct):
        if direct:
            return self.n_nodes
        return int(np.searchsorted(-self.c, -_X_SPLIT / varpi))

    def _far(self, varpi, s):
        # varpi^q * sum_{k>=s} w_k c_k^q, q = 0.._N_MOMENTS
        with np.errstate(under="ignore"):
            return np.exp(np.arange(_N_MOMENTS + 1) * math.log(varpi) + self._log_mom[:, s])

    def exponent(self, varpi, direct=False):
        """S(varpi) = log L(varpi) <= 0."""
        if varpi == 0:
            return 0.0
        s = self._split(varpi, direct)
        x = self.c[:s] * varpi
        near = np.sum(self.w[:s] * -np.expm1(-self.m * np.log1p(x)))
        far = float(self._far_exp @ self._far(varpi, s)) if s < self.n_nodes else 0.0
        return -(float(near) + far) - varpi * self.tail_coef

    def _check(self, varpi, S):
        err = self.error_bound(varpi)
        tol = self.p.numerics.quad_tolerance
        if err > tol * max(1.0, abs(S)):
            raise AccuracyError(
                f"truncation error {err:.3g} at varpi={varpi:.3g} exceeds tolerance; increase v_max"
            )
        return err

    def value(self, varpi):
        S = self.exponent(varpi)
        self._check(varpi, S)
        return math.exp(S)

    def scaled_exponent_derivs(self, varpi, n, direct=False):
        """u_j = varpi^j |S^(j)(varpi)| / (j-1)!, j = 1..n."""
        u = np.zeros(n)
        if n == 0 or varpi == 0:
            return u
        s = self._split(varpi, direct)
        x = self.c[:s] * varpi
        b = x / (1 + x)
        cur = self.w[:s] * np.exp(-self.m * np.log1p(x))
        coef = _rising_over_factorial(self.m, n)
        for j in range(n):
            cur = cur * b
            u[j] = coef[j] * np.sum(cur)
            # nodes are sorted by decreasing b; drop the negligible tail
            if j % 4 == 0 and cur.size > 64:
                tot = u[j] / coef[j]
                if tot > 0:
                    tail = np.cumsum(cur[::-1])[::-1]
                    cut = np.searchsorted(-tail, -1e-18 * tot)
                    cur, b = cur[:cut], b[:cut]
        if s < self.n_nodes:
            k = min(n, _N_MOMENTS)
            u[:k] += self._far_u[:k] @ self._far(varpi, s)
        u[0] += varpi * self.tail_coef
        return u

    def series_terms(self, varpi, n):
        S = self.exponent(varpi)
        self._check(varpi, S)
        return _series_terms(S, self.scaled_exponent_derivs(varpi, n), n)

    def series(self, varpi, k):
        """sum_{j<k} (-varpi)^j L^(j)(varpi) / j!."""
        return _guarded_sum(self.series_terms(varpi, k - 1))

    def exponent_derivs(self, varpi, n):
        """Raw S^(j)(varpi), j = 0..n."""
        out = np.empty(n + 1)
        out[0] = self.exponent(varpi)
        if n:
            x = self.c * varpi
            j = np.arange(1, n + 1)
            poch = np.exp(special.gammaln(self.m + j) - special.gammaln(self.m))
            with np.errstate(under="ignore"):
                for i in j:
                    out[i] = (-1) ** i * poch[i - 1] * np.sum(
                        self.w * self.c**i * np.exp((-self.m - i) * np.log1p(x))
                    )
            out[1] -= self.tail_coef
        return out

    def evaluate(self, varpi, n):
        S = self.exponent(varpi)
        err = self._check(varpi, S)
        dS = self.exponent_derivs(varpi, n)
        if varpi > 0:
            scaled = _series_terms(S, self.scaled_exponent_derivs(varpi, n), n)
            values = _raw_from_scaled(varpi, scaled)
        else:
            values = _raw_recursion(dS, n)
            scaled = np.zeros(n + 1)
            scaled[0] = 1.0
        return LaplaceEval(varpi, values, dS, scaled, err)


def _raw_recursion(dS, n):
    vals = np.empty(n + 1)
    vals[0] = math.exp(dS[0])
    for k in range(n):
        i = np.arange(k + 1)
        vals[k + 1] = math.fsum(special.comb(k, i) * dS[i + 1] * vals[k - i])
    return vals


class PointMassInterference:
    """Deterministic interference I0: L(varpi) = exp(-varpi I0). Test oracle world."""

    def __init__(self, i0):
        self.i0 = float(i0)

    def series_terms(self, varpi, n):
        u = np.zeros(n)
        if n:
            u[0] = varpi * self.i0
        return _series_terms(-varpi * self.i0, u, n)

    def series(self, varpi, k):
        return _guarded_sum(self.series_terms(varpi, k - 1))


def _guarded_sum(terms):
    total = math.fsum(terms)
    if total > 0 and np.max(np.abs(np.cumsum(terms))) > 1e6 * total:
        raise AccuracyError("series partial sums dwarf the result")
    return min(total, 1.0)


@lru_cache(maxsize=32)
def interference_laplace(p, in_cluster_intensity_m2=None, h_rx=None, m=None):
    return InterferenceLaplace(p, in_cluster_intensity_m2, h_rx, m)


def laplace_interference(varpi, p, in_cluster_intensity=None):
    """L(varpi) in (0, 1]; ``in_cluster_intensity`` in SBS/m^2, default (1 - c_f) lambda_b."""
    return interference_laplace(p, in_cluster_intensity).value(varpi)


def laplace_derivatives(varpi, order, p, in_cluster_intensity=None):
    return interference_laplace(p, in_cluster_intensity).evaluate(varpi, order)


def los_assignments(p_los, cap, rng=None, n_draws=256):
    """(masks, weights): every LoS assignment with its probability, or a sample of them."""
    p_los = np.asarray(p_los, dtype=float)
    kappa = p_los.size
    if kappa <= cap:
        masks = np.array(list(itertools.product((True, False), repeat=kappa)), dtype=bool).reshape(-1, kappa)
        w = np.prod(np.where(masks, p_los, 1 - p_los), axis=1)
        keep = w > 0
        return masks[keep], w[keep]
    rng = substream(0, kappa) if rng is None else rng
    masks = rng.random((n_draws, kappa)) < p_los
    return masks, np.full(n_draws, 1.0 / n_draws)


def _conditional_term(zetas, p, theta_sir, interference, m):
    g = moment_match_gamma(zetas, p, m)
    kappa = len(zetas)
    varpi = theta_sir / (kappa * p.p_tx * g.theta)
    return interference.series(varpi, g.k_int)


def conditional_coverage(r_list, p, theta_sir=None, interference=None, rng=None):
    """Upper bound on coverage given the serving distances, averaged over their LoS states."""
    r = np.asarray(r_list, dtype=float)
    if r.size == 0 or np.any(r < 0) or np.any(r > p.r_cluster):
        raise ValueError("serving distances must be nonempty and within [0, r_cluster]")
    theta_sir = p.sir_threshold if theta_sir is None else theta_sir
    interference = interference_laplace(p) if interference is None else interference
    masks, weights = los_assignments(los_probability(r, p), p.numerics.config_enum_cap, rng)
    z_los, z_nlos = path_gain(r, True, p), path_gain(r, False, p)
    total = []
    for mask, w in zip(masks, weights):
        zetas = np.where(mask, z_los, z_nlos)
        total.append(w * _conditional_term(zetas, p, theta_sir, interference, p.m_nakagami))
    return min(1.0, math.fsum(total))


@dataclass(frozen=True)
class CoverageBound:
    value: float
    stderr: float
    theta_sir: float
    per_kappa: dict = field(default_factory=dict)


def coverage_probability(p, theta_sir=None, n_geom=None, seed=None):
    """Poisson-weighted expectation of the conditional bound over serving geometries.

    Serving distances are drawn as R_c sqrt(U); each draw carries one LoS
    assignment sampled from its link probabilities, an unbiased estimate of
    the per-geometry average over assignments.
    """
    theta_sir = p.sir_threshold if theta_sir is None else theta_sir
    n_geom = p.numerics.n_geom if n_geom is None else n_geom
    seed = p.numerics.rng_seed if seed is None else seed
    lt = interference_laplace(p)
    terms, var, per_kappa = [], [], {}
    for kappa in range(1, p.kappa_max + 1):
        w = float(caching_count_pmf(kappa, p))
        if w == 0:
            continue
        rng = substream(seed, 1, kappa)
        r = p.r_cluster * np.sqrt(rng.random((n_geom, kappa)))
        los = rng.random((n_geom, kappa)) < los_probability(r, p)
        z = path_gain(r, los, p)
        s1, s2 = z.sum(axis=1), (z * z).sum(axis=1)
        theta = (p.eta_spread / p.m_nakagami) * s2 / s1
        varpi = theta_sir / (kappa * p.p_tx * theta)
        k = p.m_nakagami * kappa
        vals = np.array([lt.series(vp, k) for vp in varpi])
        mean = float(vals.mean())
        per_kappa[kappa] = mean
        terms.append(w * mean)
        var.append(w * w * vals.var(ddof=1) / n_geom if n_geom > 1 else 0.0)
    return CoverageBound(min(1.0, math.fsum(terms)), math.sqrt(math.fsum(var)), theta_sir, per_kappa)
