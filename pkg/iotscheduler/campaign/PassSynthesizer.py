"""
PassSynthesizer.py

Seeded synthetic pass catalogs. Each satellite revisits the site roughly once
per `period_hours` (with jitter); pass length, culmination time and angles are
drawn from the ranges in SynthParams. This is a stand-in for propagated pass
predictions, not orbital mechanics.
"""

from typing import List, Optional, Tuple

import numpy as np

from iotscheduler.controllers.logging_utils import get_logger
from iotscheduler.core.CampaignConfig import SynthParams
from iotscheduler.core.Exceptions import ConfigurationError
from iotscheduler.core.ScheduleModel import Instant, PassCatalog, SatellitePass

log = get_logger("PassSynthesizer")

EDGE_CEILING_DEG = 10.0


def satellite_ids(n_sats: int) -> List[str]:
    width = max(2, len(str(n_sats)))
    return [f"sat{k:0{width}d}" for k in range(1, n_sats + 1)]


def riot_eligible_count(n_sats: int, riot_fraction: float) -> int:
    """Number of leading satellites that get low-edge passes (half rounds up)."""
    return int(np.floor(riot_fraction * n_sats + 0.5))


def _edge_elevations(rng: np.random.Generator, low_edges: bool, edge_max: float) -> Tuple[float, float]:
    if low_edges:
        lo = rng.uniform(0.0, edge_max, size=2)
    else:
        # (edge_max, 10]: 1 - U lies in (0, 1]
        lo = edge_max + (EDGE_CEILING_DEG - edge_max) * (1.0 - rng.random(2))
    return round(float(lo[0]), 3), round(float(lo[1]), 3)


def synth_passes(seed: int, n_sats: int, window: Tuple[Instant, Instant],
                 params: Optional[SynthParams] = None) -> PassCatalog:
    """
    Generate a deterministic PassCatalog.

    :param seed: RNG seed; equal seeds give identical catalogs
    :param n_sats: number of satellites (ids sat01, sat02, ...)
    :param window: (start, end) of the catalog
    :param params: generator knobs; defaults to SynthParams()
    :raises ConfigurationError: if n_sats < 1 or the window cannot hold one pass
    """
    params = params or SynthParams()
    t0, t1 = int(window[0]), int(window[1])
    if n_sats < 1:
        raise ConfigurationError(f"n_sats must be >= 1 (got {n_sats})")
    if t1 - t0 < params.pass_minutes_max * 60:
        raise ConfigurationError(
            f"window of {(t1 - t0) / 60:.0f} min is shorter than one synthetic pass "
            f"({params.pass_minutes_max:.0f} min)"
        )

    rng = np.random.default_rng(seed)
    period = params.period_hours * 3600.0
    n_low = riot_eligible_count(n_sats, params.riot_fraction)
    theta_lo, theta_hi = params.theta_max_range

    passes = []
    for k, sat in enumerate(satellite_ids(n_sats)):
        low_edges = k < n_low
        offset = rng.uniform(0.0, period)
        while True:
            length = rng.uniform(params.pass_minutes_min, params.pass_minutes_max) * 60.0
            t_start = t0 + int(round(offset))
            t_end = t_start + int(round(length))
            if t_end > t1:
                break
            t_max = t_start + int(round(length * rng.uniform(0.4, 0.6)))
            theta_start, theta_end = _edge_elevations(rng, low_edges, params.riot_edge_max_deg)
            theta_max = round(float(rng.uniform(theta_lo, theta_hi)), 3)
            phi_start = float(rng.uniform(0.0, 360.0))
            phi_max = (phi_start + rng.uniform(60.0, 120.0)) % 360.0
            phi_end = (phi_start + rng.uniform(150.0, 210.0)) % 360.0

            passes.append(SatellitePass(
                satellite_id=sat,
                site_id=params.site_id,
                t_start=Instant(t_start),
                t_max=Instant(t_max),
                t_end=Instant(t_end),
                theta_start=theta_start,
                theta_max=max(theta_max, theta_start, theta_end),
                theta_end=theta_end,
                phi_start=round(phi_start, 3) % 360.0,
                phi_max=round(float(phi_max), 3) % 360.0,
                phi_end=round(float(phi_end), 3) % 360.0,
            ))
            offset += period * (1.0 + rng.uniform(-params.period_jitter, params.period_jitter))

    passes.sort(key=lambda p: (int(p.t_start), p.satellite_id))
    log.info(f"Synthesized {len(passes)} passes for {n_sats} satellites "
             f"({n_low} with low-edge passes), seed={seed}")
    return PassCatalog(site_id=params.site_id, window=(Instant(t0), Instant(t1)),
                       passes=tuple(passes))
