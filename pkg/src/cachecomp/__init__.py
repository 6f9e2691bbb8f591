"""Coverage of cache-assisted CoMP transmission to aerial users.

Monte Carlo simulation and a closed-form upper bound for the probability that
an aerial user, served jointly by the ground small cells that cache its
requested content, sees an SIR above threshold.
"""

from cachecomp.params import SystemParams, Numerics, load_config, dump_config, db_to_linear, table_i

__all__ = [
    "SystemParams",
    "Numerics",
    "load_config",
    "dump_config",
    "db_to_linear",
    "table_i",
]
__version__ = "0.1.0"
