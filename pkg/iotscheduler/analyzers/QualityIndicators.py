"""
QualityIndicators.py

Pareto-front indicators in minimized objective space:
- gd: generational distance (mean nearest-reference distance)
- spread: generalized Δ spread
- hypervolume: exact 3-D dimension sweep
plus the dominance helpers the optimizers share.
"""

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from scipy.spatial.distance import cdist

from iotscheduler.controllers.logging_utils import get_logger
from iotscheduler.core.Exceptions import IndicatorError

log = get_logger("QualityIndicators")

DEFAULT_HV_REF = (1.1, 1.1, 1.1)


# -------------------------------------------------------------------------
# Dominance
# -------------------------------------------------------------------------

def dominance_matrix(points: np.ndarray) -> np.ndarray:
    """D[i, j] is True iff point i dominates point j (minimization)."""
    F = np.asarray(points, dtype=float)
    le = (F[:, None, :] <= F[None, :, :]).all(axis=2)
    lt = (F[:, None, :] < F[None, :, :]).any(axis=2)
    return le & lt


def non_dominated_mask(points: np.ndarray) -> np.ndarray:
    F = np.asarray(points, dtype=float)
    if len(F) == 0:
        return np.zeros(0, dtype=bool)
    return ~dominance_matrix(F).any(axis=0)


def non_dominated_ranks(points: np.ndarray) -> np.ndarray:
    """Front number (0 = non-dominated) of every point."""
    F = np.asarray(points, dtype=float)
    n = len(F)
    ranks = np.full(n, -1, dtype=np.int64)
    if n == 0:
        return ranks
    D = dominance_matrix(F)
    dominated_by = D.sum(axis=0)
    rank = 0
    while np.any(ranks < 0):
        current = np.flatnonzero((dominated_by == 0) & (ranks < 0))
        ranks[current] = rank
        dominated_by = dominated_by - D[current].sum(axis=0)
        dominated_by[current] = -1
        rank += 1
    return ranks


# -------------------------------------------------------------------------
# Fronts
# -------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Front:
    """Points (n × m, minimized) of one run; provenance names the run."""

    points: np.ndarray
    provenance: str = ""
    dim: int = field(init=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(1, -1) if pts.size else pts.reshape(0, 3)
        if pts.ndim != 2:
            raise IndicatorError(f"front points must be 2-D, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise IndicatorError(f"front {self.provenance!r} has non-finite coordinates")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "dim", pts.shape[1])

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def from_points(cls, points: Iterable[Sequence[float]], provenance: str = "") -> "Front":
        """Non-dominated, de-duplicated subset of `points`, in lexicographic order."""
        pts = np.asarray(list(points), dtype=float)
        if pts.size == 0:
            return cls(np.zeros((0, 3)), provenance)
        pts = np.unique(pts, axis=0)
        return cls(pts[non_dominated_mask(pts)], provenance)


FrontLike = Union[Front, np.ndarray, Sequence[Sequence[float]]]


def _as_points(front: FrontLike) -> np.ndarray:
    if isinstance(front, Front):
        return front.points
    pts = np.asarray(front, dtype=float)
    return pts.reshape(0, 3) if pts.size == 0 else np.atleast_2d(pts)


def reference_front(runs: Sequence[FrontLike], provenance: str = "reference") -> Front:
    """Non-dominated subset of the union of all runs."""
    if not runs:
        raise IndicatorError("reference_front needs at least one run")
    pts = [_as_points(r) for r in runs]
    dims = {p.shape[1] for p in pts if len(p)}
    if len(dims) > 1:
        raise IndicatorError(f"fronts mix objective dimensionalities {sorted(dims)}")
    stacked = np.vstack([p for p in pts if len(p)]) if any(len(p) for p in pts) else np.zeros((0, 3))
    return Front.from_points(stacked, provenance)


# -------------------------------------------------------------------------
# Indicators
# -------------------------------------------------------------------------

def gd(front: FrontLike, ref: FrontLike) -> float:
    """Mean over front points of the Euclidean distance to the nearest reference point."""
    A, R = _as_points(front), _as_points(ref)
    if len(A) == 0 or len(R) == 0:
        raise IndicatorError("gd needs non-empty front and reference")
    if A.shape[1] != R.shape[1]:
        raise IndicatorError(f"gd dimension mismatch: {A.shape[1]} vs {R.shape[1]}")
    return float(cdist(A, R).min(axis=1).mean())


def _extremes(points: np.ndarray) -> np.ndarray:
    """Per objective, the point with the largest value (lexicographic tie-break)."""
    out = []
    order = np.lexsort(points.T[::-1])
    for k in range(points.shape[1]):
        best = max(order, key=lambda i: points[i, k])
        out.append(points[best])
    return np.array(out)


def spread(front: FrontLike, ref: Optional[FrontLike] = None) -> float:
    """
    Generalized Δ spread:
        (Σ_k d(e_k, A) + Σ_i |d_i - d̄|) / (Σ_k d(e_k, A) + N·d̄)
    with d_i the nearest-neighbour distance inside the front and e_k the
    per-objective extreme points of `ref` (the front itself when omitted).
    0 for fewer than two points; 1 when the denominator vanishes.
    """
    A = _as_points(front)
    n = len(A)
    if n < 2:
        return 0.0
    D = cdist(A, A)
    np.fill_diagonal(D, np.inf)
    d = D.min(axis=1)
    d_mean = d.mean()

    E = _extremes(_as_points(ref) if ref is not None and len(_as_points(ref)) else A)
    d_ext = cdist(E, A).min(axis=1).sum()

    denominator = d_ext + n * d_mean
    if denominator == 0:
        return 1.0
    return float((d_ext + np.abs(d - d_mean).sum()) / denominator)


def _area_2d(xy: np.ndarray, ref_xy: np.ndarray) -> float:
    if len(xy) == 0:
        return 0.0
    order = np.lexsort((xy[:, 1], xy[:, 0]))
    area, y_cap = 0.0, ref_xy[1]
    for x, y in xy[order]:
        if y < y_cap:
            area += (ref_xy[0] - x) * (y_cap - y)
            y_cap = y
    return area


def hypervolume(front: FrontLike, ref_point: Sequence[float] = DEFAULT_HV_REF) -> float:
    """
    Exact hypervolume of a 3-D front: sweep along the third objective,
    integrating the 2-D dominated area between consecutive levels. Points not
    dominating ref_point are dropped with a warning.
    """
    A = _as_points(front)
    ref = np.asarray(ref_point, dtype=float)
    if len(A) == 0:
        return 0.0
    if A.shape[1] != 3 or ref.shape != (3,):
        raise IndicatorError(f"hypervolume is implemented for 3 objectives (got {A.shape[1]})")

    beyond = np.any(A > ref, axis=1)
    if np.any(beyond):
        msg = f"{int(beyond.sum())} point(s) beyond the HV reference point {tuple(ref)} discarded"
        log.warning(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        A = A[~beyond]
    if len(A) == 0:
        return 0.0

    A = A[np.argsort(A[:, 2], kind="stable")]
    volume = 0.0
    for i in range(len(A)):
        z_next = A[i + 1, 2] if i + 1 < len(A) else ref[2]
        if z_next > A[i, 2]:
            volume += _area_2d(A[: i + 1, :2], ref[:2]) * (z_next - A[i, 2])
    return float(volume)
