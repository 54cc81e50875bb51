"""
FitnessFunctions.py

The three schedule objectives, the slot cost model and the penalty that keeps
every infeasible individual behind every feasible one.

Internally everything is minimized: (1 - use, 1 - frag, cost).
"""

from dataclasses import dataclass, replace
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from iotscheduler.campaign.CandidateGenerator import CandidateSet
from iotscheduler.constraints.ConflictGraph import ConflictGraph
from iotscheduler.controllers.logging_utils import get_logger
from iotscheduler.core.CampaignConfig import CostModel, SlottingPolicy
from iotscheduler.core.Exceptions import ConfigurationError, EmptyScheduleError
from iotscheduler.core.ScheduleModel import (
    Duration,
    ProcedureSchedule,
    SlotSchedule,
    span_schedule,
)
from iotscheduler.slotting.SlotScheduler import schedule_bounds, slot_bounds_for

log = get_logger("FitnessFunctions")

Triple = Tuple[float, float, float]
NO_FEASIBLE_MAX: Triple = (1.0, 1.0, 1.0)


@dataclass(frozen=True)
class FitnessVector:
    """
    Raw objective values plus what the optimizer minimizes.

    use / frag / cost are None for infeasible schedules (not computed);
    minimized is None until apply_penalty has run.
    """

    violations: int
    use: Optional[float] = None
    frag: Optional[float] = None
    cost: Optional[float] = None
    cost_value: Optional[float] = None
    n_slots: Optional[int] = None
    minimized: Optional[Triple] = None

    @property
    def feasible(self) -> bool:
        return self.violations == 0

    @property
    def raw_minimized(self) -> Optional[Triple]:
        if not self.feasible:
            return None
        return (1.0 - self.use, 1.0 - self.frag, self.cost)

    def with_penalty(self, feasible_max: Triple) -> "FitnessVector":
        if self.feasible:
            return replace(self, minimized=self.raw_minimized)
        g = float(self.violations)
        return replace(self, minimized=tuple(m + g for m in feasible_max))

    def to_dict(self) -> dict:
        return {
            "violations": self.violations,
            "use": self.use,
            "frag": self.frag,
            "cost": self.cost,
            "cost_value": self.cost_value,
            "n_slots": self.n_slots,
        }


# -------------------------------------------------------------------------
# Objectives
# -------------------------------------------------------------------------

def _fit_use_values(n: int, span: int, total: int, delta_c: int) -> float:
    if n == 0:
        raise EmptyScheduleError("utilization of an empty schedule is undefined")
    return ((n - 1) * delta_c + total) / span


def fit_use(s: ProcedureSchedule, delta_c: Duration) -> float:
    """((|S|-1)·δc + Σ duration) / span(S); 1 for back-to-back procedures separated by δc."""
    if len(s) == 0:
        raise EmptyScheduleError("utilization of an empty schedule is undefined")
    total = sum(int(p.duration) for p in s.procedures)
    return _fit_use_values(len(s), int(span_schedule(s)), total, int(delta_c))


def _fit_frag_values(n_procedures: int, n_slots: int) -> float:
    if n_procedures <= 1:
        return 1.0
    return 1.0 - (n_slots - 1) / (n_procedures - 1)


def fit_frag(s: ProcedureSchedule, q: SlotSchedule) -> float:
    """1 - (|Q|-1)/(|S|-1); 1 when |S| <= 1."""
    return _fit_frag_values(len(s), len(q))


def _slot_cost(seconds: int, m: CostModel) -> float:
    minutes = seconds / 60.0
    if minutes < m.day_threshold_minutes:
        return minutes / 60.0 * m.rate_per_hour
    return m.day_cap_cost


def _cost_of_bounds(bounds: Iterable[Tuple[int, int]], m: CostModel) -> float:
    return float(sum(_slot_cost(b - a, m) for a, b in bounds))


def cost_of(q: SlotSchedule, m: CostModel) -> float:
    """Σ over slots of span/60·rate below the day threshold, day_cap otherwise."""
    return _cost_of_bounds(((int(s.t_start), int(s.t_end)) for s in q.slots), m)


def _normalize_cost(value: float, m: CostModel) -> float:
    if not m.has_bounds:
        raise ConfigurationError("cost_min/cost_max unset; call derive_cost_bounds first")
    if m.cost_max == m.cost_min:
        raise ConfigurationError("cost_max equals cost_min, normalized cost is undefined")
    return float(np.clip((value - m.cost_min) / (m.cost_max - m.cost_min), 0.0, 1.0))


def fit_cost(q: SlotSchedule, m: CostModel) -> float:
    """(cost(Q) - cost_min) / (cost_max - cost_min), clamped to [0, 1]."""
    return _normalize_cost(cost_of(q, m), m)


def derive_cost_bounds(cands: CandidateSet, policy: SlottingPolicy, m: CostModel) -> CostModel:
    """
    Fill unset cost bounds from the candidate set.

    cost_min: one contiguous block holding the shortest candidate of every
    requirement, rounded up to the slot quantum.
    cost_max: every requirement's most expensive candidate in its own slot,
    no merging or consolidation.
    """
    if m.has_bounds:
        return m

    quantum = policy.slot_quantum_minutes * 60
    shortest = sum(int((cands.ends[list(o)] - cands.starts[list(o)]).min()) for o in cands.options)
    block = max(1, -(-shortest // quantum)) * quantum
    cost_min = m.cost_min if m.cost_min is not None else _slot_cost(block, m)

    if m.cost_max is not None:
        cost_max = m.cost_max
    else:
        cost_max = 0.0
        for o in cands.options:
            worst = 0.0
            for i in o:
                a, b = slot_bounds_for(int(cands.starts[i]), int(cands.ends[i]),
                                       int(cands.config_times[i]), policy)
                worst = max(worst, _slot_cost(b - a, m))
            cost_max += worst

    if not cost_min < cost_max:
        bumped = cost_min + m.rate_per_hour * quantum / 3600.0
        log.warning(f"Derived cost bounds collapse ({cost_min:.1f} >= {cost_max:.1f}); "
                    f"using cost_max={bumped:.1f}")
        cost_max = bumped

    log.info(f"Cost bounds: cost_min={cost_min:.1f}, cost_max={cost_max:.1f}")
    return m.model_copy(update={"cost_min": float(cost_min), "cost_max": float(cost_max)})


# -------------------------------------------------------------------------
# Evaluation pipeline
# -------------------------------------------------------------------------

def evaluate_indices(idx: np.ndarray, cands: CandidateSet, g: ConflictGraph,
                     policy: SlottingPolicy, m: CostModel, delta_c: int) -> FitnessVector:
    """
    Raw evaluation of the schedule given by candidate indices. This is the
    call counted against an optimizer's evaluation budget.
    """
    idx = np.asarray(idx, dtype=np.int64)
    if len(idx) == 0:
        raise EmptyScheduleError("cannot evaluate an empty schedule")
    violations = g.violations_of_indices(idx)
    if violations:
        return FitnessVector(violations=violations)

    starts, ends, configs = cands.starts[idx], cands.ends[idx], cands.config_times[idx]
    span = int(ends.max() - starts.min())
    use = _fit_use_values(len(idx), span, int((ends - starts).sum()), int(delta_c))
    bounds = schedule_bounds(starts.tolist(), ends.tolist(), configs.tolist(), policy)
    value = _cost_of_bounds(bounds, m)
    return FitnessVector(
        violations=0,
        use=use,
        frag=_fit_frag_values(len(idx), len(bounds)),
        cost=_normalize_cost(value, m),
        cost_value=value,
        n_slots=len(bounds),
    )


def evaluate_raw(s: ProcedureSchedule, cands: CandidateSet, g: ConflictGraph,
                 policy: SlottingPolicy, m: CostModel, delta_c: Duration) -> FitnessVector:
    return evaluate_indices(g.indices_of(s), cands, g, policy, m, int(delta_c))


def feasible_maxima(vectors: Iterable[FitnessVector]) -> Triple:
    """Per-objective maxima (minimized orientation) over the feasible vectors."""
    rows = [v.raw_minimized for v in vectors if v.feasible]
    if not rows:
        return NO_FEASIBLE_MAX
    return tuple(float(x) for x in np.max(np.array(rows), axis=0))


def apply_penalty(vectors: Sequence[FitnessVector],
                  feasible_max: Optional[Triple] = None) -> List[FitnessVector]:
    """
    Set `minimized` on every vector: raw for feasible ones, feasible maxima
    plus the violation count for infeasible ones. The maxima default to those
    of `vectors` itself.
    """
    fmax = feasible_max if feasible_max is not None else feasible_maxima(vectors)
    return [v.with_penalty(fmax) for v in vectors]


def evaluate(s: ProcedureSchedule, cands: CandidateSet, g: ConflictGraph,
             policy: SlottingPolicy, m: CostModel,
             pop_feasible_max: Triple = NO_FEASIBLE_MAX,
             delta_c: Optional[Duration] = None) -> FitnessVector:
    """
    evaluate_raw followed by the penalty. delta_c defaults to the smallest
    config_time in s.
    """
    if delta_c is None:
        delta_c = Duration(min((int(p.config_time) for p in s.procedures), default=0))
    return evaluate_raw(s, cands, g, policy, m, delta_c).with_penalty(pop_feasible_max)


def scalar_fitness(v: FitnessVector) -> float:
    """
    Single-number fitness for the ant colony: mean of use, frag and
    1 - cost (higher is better); minus the violation count when infeasible.
    """
    if not v.feasible:
        return -float(v.violations)
    return (v.use + v.frag + (1.0 - v.cost)) / 3.0
