"""Parameter record for the cached-CoMP coverage model.

Gains and path-loss constants are stored as linear power ratios; decibels only
appear at the config/CLI boundary (keys ending in ``_db``). Lengths are meters.
Densities (``lambda_b``, ``bldg_density``) are written per km^2, the unit used
throughout the literature, and converted by the ``*_m2`` properties.

Config files are flat ``key = value`` text, one pair per line, ``#`` comments.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

from scipy.stats import poisson


class ConfigError(ValueError):
    """Bad config text or a parameter set violating the model invariants."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def db_to_linear(x_db):
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x):
    return 10.0 * math.log10(x)


BLOCKAGE_DENOMINATORS = ("p_plus_1", "m_plus_1")


@dataclass(frozen=True)
class Numerics:
    r_sim_window: float = 10_000.0  # explicit PPP radius in the simulator (m)
    kappa_max: int | None = None  # None: Poisson tail below 1e-9
    n_trials: int = 10_000
    quad_tolerance: float = 1e-8
    v_max: float = 400_000.0  # quadrature cut for the out-of-cluster integral (m)
    config_enum_cap: int = 12  # full 2^kappa LoS enumeration up to this many servers
    rng_seed: int = 0
    n_geom: int = 2000  # serving-distance draws per kappa in the analytic bound


@dataclass(frozen=True)
class SystemParams:
    alpha_los: float = 2.09
    alpha_nlos: float = 3.75
    a_los: float = db_to_linear(-41.1)
    a_nlos: float = db_to_linear(-32.9)
    g_main: float = db_to_linear(10.0)
    g_side: float = db_to_linear(-3.01)
    m_nakagami: int = 3
    eta_spread: float = 2.0
    h_sbs: float = 30.0
    h_ue: float = 100.0
    bldg_area_fraction: float = 0.3
    bldg_density: float = 200.0  # buildings per km^2
    bldg_height_scale: float = 15.0
    r_cluster: float = 200.0
    lambda_b: float = 20.0  # SBS per km^2
    sir_threshold: float = 1.0
    theta_tilt: float = 8.0  # degrees
    theta_beam: float = 30.0  # degrees
    c_f: float = 1.0
    p_tx: float = 1.0
    # Ground-user comparison: handset height and Rayleigh fading.
    h_ground: float = 1.5
    m_ground: int = 1
    blockage_denominator: str = "p_plus_1"
    # Out-of-cluster interferer density; None means lambda_b.
    lambda_out: float | None = None
    numerics: Numerics = field(default_factory=Numerics)

    def __post_init__(self):
        problems = self.violations()
        if problems:
            raise ConfigError(problems)

    def violations(self):
        out = []
        if not self.alpha_los < self.alpha_nlos:
            out.append("alpha_los must be < alpha_nlos")
        if not self.alpha_nlos > 2:
            out.append("alpha_nlos must exceed 2 for a finite out-of-cluster integral")
        if not 0.0 <= self.c_f <= 1.0:
            out.append(f"c_f must lie in [0, 1], got {self.c_f}")
        positive = (
            "alpha_los", "a_los", "a_nlos", "g_main", "g_side", "eta_spread",
            "h_sbs", "h_ue", "bldg_area_fraction", "bldg_density",
            "bldg_height_scale", "r_cluster", "lambda_b", "sir_threshold",
            "theta_beam", "p_tx", "h_ground",
        )
        for name in positive:
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                out.append(f"{name} must be finite and > 0, got {v}")
        if self.lambda_out is not None and not self.lambda_out >= 0:
            out.append(f"lambda_out must be >= 0, got {self.lambda_out}")
        for name in ("m_nakagami", "m_ground"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                out.append(f"{name} must be an integer >= 1, got {v!r}")
        if self.blockage_denominator not in BLOCKAGE_DENOMINATORS:
            out.append(f"blockage_denominator must be one of {BLOCKAGE_DENOMINATORS}")
        n = self.numerics
        if not n.r_sim_window > self.r_cluster:
            out.append("r_sim_window must exceed r_cluster")
        if not n.v_max > max(self.r_cluster, n.r_sim_window):
            out.append("v_max must exceed r_cluster and r_sim_window")
        if n.kappa_max is not None and n.kappa_max < self.kappa_floor():
            out.append(
                f"kappa_max={n.kappa_max} below ceil(mean) + 8 sqrt(mean) = {self.kappa_floor()}"
            )
        if n.n_trials < 1 or n.n_geom < 1 or n.config_enum_cap < 0:
            out.append("n_trials, n_geom must be >= 1 and config_enum_cap >= 0")
        if not n.quad_tolerance > 0:
            out.append("quad_tolerance must be > 0")
        return out

    @property
    def lambda_b_m2(self):
        return self.lambda_b * 1e-6

    @property
    def lambda_out_m2(self):
        lam = self.lambda_b if self.lambda_out is None else self.lambda_out
        return lam * 1e-6

    @property
    def lambda_noncaching_m2(self):
        return (1.0 - self.c_f) * self.lambda_b_m2

    @property
    def mean_caching_count(self):
        return self.c_f * self.lambda_b_m2 * math.pi * self.r_cluster**2

    def kappa_floor(self):
        mu = self.mean_caching_count
        return max(1, math.ceil(math.ceil(mu) + 8.0 * math.sqrt(mu)))

    def auto_kappa_max(self):
        """Smallest cap above the floor whose Poisson tail mass is below 1e-9."""
        k = self.kappa_floor()
        while poisson.sf(k, self.mean_caching_count) >= 1e-9:
            k += 1
        return k

    @property
    def kappa_max(self):
        k = self.numerics.kappa_max
        return self.auto_kappa_max() if k is None else k

    def replace(self, **changes):
        """Copy with overrides; numerics keys may be given flat."""
        num = {k: changes.pop(k) for k in list(changes) if k in _NUMERIC_KEYS}
        if num:
            changes["numerics"] = dataclasses.replace(self.numerics, **num)
        return dataclasses.replace(self, **changes)

    def for_ground_user(self):
        return self.replace(h_ue=self.h_ground, m_nakagami=self.m_ground)


_PARAM_KEYS = {f.name: f for f in dataclasses.fields(SystemParams) if f.name != "numerics"}
_NUMERIC_KEYS = {f.name: f for f in dataclasses.fields(Numerics)}
_DB_KEYS = ("a_los", "a_nlos", "g_main", "g_side", "sir_threshold")
_INT_KEYS = {"m_nakagami", "m_ground", "kappa_max", "n_trials", "config_enum_cap", "rng_seed", "n_geom"}
_STR_KEYS = {"blockage_denominator"}
_OPTIONAL_KEYS = {"lambda_out", "kappa_max"}


def table_i():
    """Defaults: the reference scenario (100 m UAV, 200 m clusters, c_f = 1)."""
    return SystemParams()


def _coerce(key, raw, lineno):
    if key in _OPTIONAL_KEYS and raw.lower() in ("none", ""):
        return None
    if key in _STR_KEYS:
        return raw.strip("\"'")
    try:
        if key in _INT_KEYS:
            value = float(raw)
            if not value.is_integer():
                raise ValueError
            return int(value)
        return float(raw)
    except ValueError:
        raise ConfigError(f"line {lineno}: cannot parse {key} = {raw!r}") from None


def parse_config(text):
    """Parse flat key/value text into overrides for ``SystemParams.replace``."""
    overrides = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, raw = line.split("=", 1)
        elif ":" in line:
            key, raw = line.split(":", 1)
        else:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = key.strip(), raw.strip()
        if key.endswith("_db") and key[:-3] in _DB_KEYS:
            name = key[:-3]
            value = db_to_linear(_coerce(name, raw, lineno))
        elif key in _PARAM_KEYS or key in _NUMERIC_KEYS:
            name = key
            value = _coerce(key, raw, lineno)
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if name in overrides:
            raise ConfigError(f"line {lineno}: duplicate key {name!r}")
        overrides[name] = value
    return overrides


def loads_config(text):
    return table_i().replace(**parse_config(text))


def load_config(path):
    """Read a config file; absent keys keep the reference defaults.

    ``tableI`` (or ``table1``) as the path selects the defaults directly.
    """
    if str(path).lower() in ("tablei", "table1", "table_i"):
        return table_i()
    text = Path(path).read_text()
    return loads_config(text)


def dump_config(p):
    """Serialize to config text such that ``loads_config(dump_config(p)) == p``."""
    lines = []
    for name in _PARAM_KEYS:
        lines.append(f"{name} = {_fmt(getattr(p, name))}")
    for name in _NUMERIC_KEYS:
        lines.append(f"{name} = {_fmt(getattr(p.numerics, name))}")
    return "\n".join(lines) + "\n"


def _fmt(v):
    if v is None:
        return "none"
    if isinstance(v, float):
        return repr(v)
    return str(v)
