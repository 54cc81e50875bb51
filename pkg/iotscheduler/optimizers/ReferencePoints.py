"""
ReferencePoints.py

Reference directions on the unit simplex for niche-preserving selection.
"energy" (Riesz s-energy) is the default; "das-dennis" lattices are the
fallback. Both come from pymoo.
"""

from functools import lru_cache
from math import comb

import numpy as np
from pymoo.util.ref_dirs import get_reference_directions

from iotscheduler.controllers.logging_utils import get_logger
from iotscheduler.core.Exceptions import ConfigurationError

log = get_logger("ReferencePoints")

ENERGY_SEED = 1


def das_dennis_partitions(n_points: int, n_obj: int = 3) -> int:
    """Smallest lattice resolution giving at least n_points directions."""
    p = 1
    while comb(p + n_obj - 1, n_obj - 1) < n_points:
        p += 1
    return p


@lru_cache(maxsize=16)
def _directions(n_points: int, n_obj: int, method: str) -> np.ndarray:
    if method == "energy":
        dirs = get_reference_directions("energy", n_obj, n_points, seed=ENERGY_SEED)
    elif method == "das-dennis":
        dirs = get_reference_directions("das-dennis", n_obj,
                                        n_partitions=das_dennis_partitions(n_points, n_obj))
    else:
        raise ConfigurationError(f"unknown reference point method {method!r}")
    dirs = np.asarray(dirs, dtype=float)
    dirs.setflags(write=False)
    log.debug(f"{len(dirs)} {method} reference directions for {n_obj} objectives")
    return dirs


def reference_directions(n_points: int, n_obj: int = 3, method: str = "energy") -> np.ndarray:
    """Read-only (n × n_obj) array of simplex points; cached per arguments."""
    if n_points < n_obj:
        raise ConfigurationError(f"need at least {n_obj} reference points (got {n_points})")
    return _directions(n_points, n_obj, method)
