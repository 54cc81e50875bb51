"""
SlotScheduler.py

Turns a procedure schedule into antenna slots:

    generate_slot per procedure -> combine_overlapping -> requantize
    -> consolidate, repeated until nothing changes.

Slots start on align_minutes boundaries and last a whole number of
slot_quantum_minutes. When more than consolidation_threshold_minutes of slot
time fall inside one consolidation window (anchored at a slot start), the run
is replaced by a single window-long slot.

The int-tuple helpers (`*_bounds`) are what the fitness evaluation calls; the
Slot-level functions wrap them for the public API.
"""

from typing import Dict, Iterable, List, Sequence, Tuple

from iotscheduler.controllers.logging_utils import get_logger
from iotscheduler.core.CampaignConfig import SlottingPolicy
from iotscheduler.core.ScheduleModel import (
    Instant,
    IotSchedule,
    ProcedureSchedule,
    Slot,
    SlotSchedule,
    TestProcedure,
)

log = get_logger("SlotScheduler")

Bounds = Tuple[int, int]


# -------------------------------------------------------------------------
# int-level core
# -------------------------------------------------------------------------

def cover_bounds(start: int, end: int, config: int, policy: SlottingPolicy) -> Bounds:
    if policy.cover_config_time:
        return start - config, end
    return start, end


def slot_bounds_for(start: int, end: int, config: int, policy: SlottingPolicy) -> Bounds:
    align = policy.align_minutes * 60
    quantum = policy.slot_quantum_minutes * 60
    c0, c1 = cover_bounds(start, end, config, policy)
    s0 = c0 - (c0 % align)
    n_quanta = max(1, -(-(c1 - s0) // quantum))
    return s0, s0 + n_quanta * quantum


def combine_bounds(slots: Iterable[Bounds]) -> List[Bounds]:
    merged: List[List[int]] = []
    for s0, s1 in sorted(slots):
        if merged and s0 <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], s1)
        else:
            merged.append([s0, s1])
    return [(a, b) for a, b in merged]


def requantize_bounds(slots: Iterable[Bounds], policy: SlottingPolicy) -> List[Bounds]:
    quantum = policy.slot_quantum_minutes * 60
    out = []
    for s0, s1 in slots:
        n_quanta = max(1, -(-(s1 - s0) // quantum))
        out.append((s0, s0 + n_quanta * quantum))
    return out


def _consolidate_once(slots: List[Bounds], policy: SlottingPolicy) -> Tuple[List[Bounds], bool]:
    window = policy.consolidation_window_minutes * 60
    threshold = policy.consolidation_threshold_minutes * 60
    for i, (s0, s1) in enumerate(slots):
        w_end = s0 + window
        run_end = i
        total = 0
        while run_end < len(slots) and slots[run_end][0] < w_end:
            a, b = slots[run_end]
            total += min(b, w_end) - a
            run_end += 1
        if run_end - i == 1 and s1 - s0 >= window:
            continue
        if total > threshold:
            tail = max(w_end, max(b for _, b in slots[i:run_end]))
            return slots[:i] + [(s0, tail)] + slots[run_end:], True
    return slots, False


def consolidate_bounds(slots: Sequence[Bounds], policy: SlottingPolicy) -> List[Bounds]:
    current = combine_bounds(slots)
    changed = True
    while changed:
        current, changed = _consolidate_once(current, policy)
        if changed:
            current = combine_bounds(current)
    return current


def sanitize_bounds(slots: Iterable[Bounds], policy: SlottingPolicy) -> List[Bounds]:
    """combine -> requantize -> consolidate until a fixed point."""
    current = combine_bounds(slots)
    while True:
        before = current
        current = combine_bounds(requantize_bounds(current, policy))
        current = consolidate_bounds(current, policy)
        if current == before:
            return current


def schedule_bounds(starts: Sequence[int], ends: Sequence[int], configs: Sequence[int],
                    policy: SlottingPolicy) -> List[Bounds]:
    raw = [slot_bounds_for(int(a), int(b), int(c), policy) for a, b, c in zip(starts, ends, configs)]
    return sanitize_bounds(raw, policy)


# -------------------------------------------------------------------------
# Slot-level API
# -------------------------------------------------------------------------

def _to_slots(bounds: Iterable[Bounds]) -> List[Slot]:
    return [Slot(t_start=Instant(a), t_end=Instant(b)) for a, b in bounds]


def _to_bounds(slots: Iterable[Slot]) -> List[Bounds]:
    return [(int(q.t_start), int(q.t_end)) for q in slots]


def generate_slot(p: TestProcedure, policy: SlottingPolicy) -> Slot:
    """Smallest aligned, quantized slot holding the procedure's cover interval."""
    a, b = slot_bounds_for(int(p.t_start), int(p.t_end), int(p.config_time), policy)
    return Slot(t_start=Instant(a), t_end=Instant(b))


def combine_overlapping(slots: Iterable[Slot]) -> List[Slot]:
    """Chronological union of overlapping or touching slots."""
    return _to_slots(combine_bounds(_to_bounds(slots)))


def requantize(slots: Iterable[Slot], policy: SlottingPolicy) -> List[Slot]:
    """Extend each slot to the next whole number of quanta."""
    return _to_slots(requantize_bounds(_to_bounds(slots), policy))


def consolidate(slots: Iterable[Slot], policy: SlottingPolicy) -> List[Slot]:
    """Replace every over-threshold run inside a consolidation window by one window-long slot."""
    return _to_slots(consolidate_bounds(_to_bounds(slots), policy))


def slot_schedule(s: ProcedureSchedule, policy: SlottingPolicy) -> SlotSchedule:
    if len(s) == 0:
        return SlotSchedule(slots=())
    procs = s.procedures
    bounds = schedule_bounds([p.t_start for p in procs], [p.t_end for p in procs],
                             [p.config_time for p in procs], policy)
    log.debug(f"{len(procs)} procedures -> {len(bounds)} slots")
    return SlotSchedule(slots=tuple(_to_slots(bounds)))


def iot_schedule(s: ProcedureSchedule, policy: SlottingPolicy) -> IotSchedule:
    """The procedure schedule together with its slots."""
    return IotSchedule(procedures=s, slots=slot_schedule(s, policy),
                       cover_config_time=policy.cover_config_time)


def procedures_per_slot(s: ProcedureSchedule, q: SlotSchedule,
                        policy: SlottingPolicy) -> Dict[int, List[str]]:
    """Slot index -> ids of the procedures whose cover interval it holds."""
    assignment: Dict[int, List[str]] = {k: [] for k in range(len(q))}
    for p in sorted(s.procedures, key=lambda t: (int(t.t_start), t.id)):
        c0, c1 = cover_bounds(int(p.t_start), int(p.t_end), int(p.config_time), policy)
        for k, slot in enumerate(q.slots):
            if slot.contains(c0, c1):
                assignment[k].append(p.id)
                break
    return assignment
