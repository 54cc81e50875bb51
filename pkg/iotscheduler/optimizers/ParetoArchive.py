"""
ParetoArchive.py

The reported result of every optimizer: an elitist archive that, once any
feasible schedule has been seen, holds only feasible mutually non-dominated
entries (one per objective vector). Until then it keeps the distinct
schedules with the fewest violations.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

import numpy as np

from iotscheduler.analyzers.QualityIndicators import DEFAULT_HV_REF, hypervolume, non_dominated_mask
from iotscheduler.campaign.CandidateGenerator import CandidateSet
from iotscheduler.core.CampaignConfig import SlottingPolicy
from iotscheduler.objectives.FitnessFunctions import NO_FEASIBLE_MAX, FitnessVector
from iotscheduler.optimizers.Genome import Genome, decode
from iotscheduler.slotting.SlotScheduler import procedures_per_slot, slot_schedule

MAX_INFEASIBLE_ENTRIES = 100


@dataclass(frozen=True)
class ArchiveEntry:
    genome: Genome
    fitness: FitnessVector

    @property
    def objectives(self) -> Tuple[float, float, float]:
        """Minimized objectives; infeasible entries are penalized against (1, 1, 1)."""
        if self.fitness.feasible:
            return self.fitness.raw_minimized
        return self.fitness.with_penalty(NO_FEASIBLE_MAX).minimized

    def sort_key(self):
        return (self.fitness.violations, self.objectives, self.genome.genes)


class ParetoArchive:
    """Unbounded elitist archive; see module docstring for the retention rule."""

    def __init__(self, entries: Iterable[ArchiveEntry] = ()):
        self._entries: List[ArchiveEntry] = []
        self._genomes: set = set()
        # objectives of the feasible entries, row-aligned with _entries
        self._points = np.zeros((0, 3))
        self._feasible = False
        self.update(entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[ArchiveEntry]:
        return iter(self._entries)

    @property
    def entries(self) -> List[ArchiveEntry]:
        return list(self._entries)

    @property
    def has_feasible(self) -> bool:
        return self._feasible

    @property
    def min_violations(self) -> Optional[int]:
        if not self._entries:
            return None
        return min(e.fitness.violations for e in self._entries)

    def update(self, entries: Iterable[ArchiveEntry]) -> int:
        """Offer new entries; returns how many were admitted."""
        admitted = 0
        for e in entries:
            if e.genome in self._genomes:
                continue
            if e.fitness.feasible:
                admitted += self._offer_feasible(e)
            else:
                admitted += self._offer_infeasible(e)
        if admitted:
            order = sorted(range(len(self._entries)), key=lambda i: self._entries[i].sort_key())
            self._entries = [self._entries[i] for i in order]
            if self._feasible:
                self._points = self._points[order]
        return admitted

    def _offer_feasible(self, e: ArchiveEntry) -> int:
        if not self._feasible:
            self._entries = []
            self._genomes = set()
            self._points = np.zeros((0, 3))
            self._feasible = True
        point = np.array(e.objectives, dtype=float)
        if len(self._points):
            # dominated by, or equal to, an incumbent
            if np.any(np.all(self._points <= point, axis=1)):
                return 0
            beaten = np.all(point <= self._points, axis=1) & np.any(point < self._points, axis=1)
            if np.any(beaten):
                self._entries = [x for x, b in zip(self._entries, beaten) if not b]
                self._points = self._points[~beaten]
                self._genomes = {x.genome for x in self._entries}
        self._entries.append(e)
        self._points = np.vstack([self._points, point])
        self._genomes.add(e.genome)
        return 1

    def _offer_infeasible(self, e: ArchiveEntry) -> int:
        if self.has_feasible:
            return 0
        best = self.min_violations
        if best is not None and e.fitness.violations > best:
            return 0
        if best is not None and e.fitness.violations < best:
            self._entries = []
            self._genomes = set()
        if len(self._entries) >= MAX_INFEASIBLE_ENTRIES:
            return 0
        self._entries.append(e)
        self._genomes.add(e.genome)
        return 1

    # --- views ---

    def points(self) -> np.ndarray:
        if not self._entries:
            return np.zeros((0, 3))
        return np.array([e.objectives for e in self._entries], dtype=float)

    def feasible_points(self) -> np.ndarray:
        pts = [e.objectives for e in self._entries if e.fitness.feasible]
        return np.array(pts, dtype=float) if pts else np.zeros((0, 3))

    def hypervolume(self, ref_point=DEFAULT_HV_REF) -> float:
        return hypervolume(self.feasible_points(), ref_point)

    def is_mutually_non_dominated(self) -> bool:
        pts = self.points()
        return bool(np.all(non_dominated_mask(pts))) if len(pts) else True

    def to_records(self, cands: CandidateSet, policy: SlottingPolicy) -> List[Dict]:
        """Archive JSON records: genome, procedures, slots and both fitness views."""
        records = []
        for e in self._entries:
            s = decode(e.genome, cands)
            q = slot_schedule(s, policy)
            members = procedures_per_slot(s, q, policy)
            records.append({
                "genome": list(e.genome.genes),
                "procedures": [
                    {
                        "id": p.id,
                        "type": p.proc_type.value,
                        "satellite": p.satellite_id,
                        "t_start": p.t_start.to_iso(),
                        "t_end": p.t_end.to_iso(),
                        "config_minutes": p.config_time.minutes,
                    }
                    for p in s.procedures
                ],
                "slots": [
                    {
                        "t_start": slot.t_start.to_iso(),
                        "t_end": slot.t_end.to_iso(),
                        "procedures": members[k],
                    }
                    for k, slot in enumerate(q.slots)
                ],
                "fitness_raw": e.fitness.to_dict(),
                "fitness_minimized": list(e.objectives),
            })
        return records
