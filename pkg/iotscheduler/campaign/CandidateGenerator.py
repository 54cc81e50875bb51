"""
CandidateGenerator.py

Builds the candidate procedure set T from a pass catalog and a campaign:

- SQM: three placements of sqm_duration per pass (start at, end at and
  centered on the culmination time t_max); placements that leave the pass are
  dropped.
- RIOT: one candidate spanning the whole pass, only for passes whose rise and
  set elevations are both within riot_max_edge_elevation_deg.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np
from tabulate import tabulate

from iotscheduler.controllers.logging_utils import get_logger
from iotscheduler.core.CampaignConfig import CampaignSpec, Requirement
from iotscheduler.core.Exceptions import ConfigurationError, InfeasibleScenarioError
from iotscheduler.core.ScheduleModel import (
    Duration,
    Instant,
    PassCatalog,
    ProcedureType,
    SatellitePass,
    TestProcedure,
)

log = get_logger("CandidateGenerator")

SQM_PLACEMENTS = ("a", "b", "c")  # start at t_max, end at t_max, centered


@dataclass(frozen=True)
class CandidateSet:
    """
    T plus the requirement index. `options[k]` lists the candidate indices
    that satisfy requirements[k], in generation order.
    """

    candidates: Tuple[TestProcedure, ...]
    requirements: Tuple[Requirement, ...]
    options: Tuple[Tuple[int, ...], ...]
    # flat integer views of the candidates, built in __post_init__
    starts: np.ndarray = field(init=False, repr=False, compare=False)
    ends: np.ndarray = field(init=False, repr=False, compare=False)
    config_times: np.ndarray = field(init=False, repr=False, compare=False)
    requirement_of: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.options) != len(self.requirements):
            raise ValueError("options must align with requirements")
        owner = np.full(len(self.candidates), -1, dtype=np.int64)
        for k, idx in enumerate(self.options):
            for i in idx:
                if owner[i] != -1:
                    raise ValueError(f"candidate {self.candidates[i].id} satisfies two requirements")
                owner[i] = k
        if np.any(owner < 0):
            orphan = self.candidates[int(np.argmax(owner < 0))].id
            raise ValueError(f"candidate {orphan} satisfies no requirement")
        ids = [c.id for c in self.candidates]
        if len(set(ids)) != len(ids):
            raise ValueError("candidate ids must be unique")

        object.__setattr__(self, "starts", np.array([int(c.t_start) for c in self.candidates], dtype=np.int64))
        object.__setattr__(self, "ends", np.array([int(c.t_end) for c in self.candidates], dtype=np.int64))
        object.__setattr__(self, "config_times", np.array([int(c.config_time) for c in self.candidates], dtype=np.int64))
        object.__setattr__(self, "requirement_of", owner)
        object.__setattr__(self, "_index", {cid: i for i, cid in enumerate(ids)})

    def __len__(self) -> int:
        return len(self.candidates)

    @property
    def n_requirements(self) -> int:
        return len(self.requirements)

    @property
    def by_requirement(self) -> Dict[Requirement, List[int]]:
        return {req: list(idx) for req, idx in zip(self.requirements, self.options)}

    @property
    def option_counts(self) -> np.ndarray:
        return np.array([len(o) for o in self.options], dtype=np.int64)

    def index_of(self, procedure_id: str) -> int:
        return self._index[procedure_id]

    def has(self, procedure_id: str) -> bool:
        return procedure_id in self._index

    def summary_table(self) -> str:
        rows = []
        for req, idx in zip(self.requirements, self.options):
            rows.append([str(req), len(idx),
                         self.candidates[idx[0]].t_start.to_iso(),
                         self.candidates[idx[-1]].t_end.to_iso()])
        return tabulate(rows, headers=["Requirement", "Candidates", "First start", "Last end"],
                        tablefmt="github")


def _sqm_candidates(p: SatellitePass, pass_no: int, length: Duration,
                    config_time: Duration) -> List[TestProcedure]:
    half = int(length) // 2
    t_max = int(p.t_max)
    placements = {
        "a": (t_max, t_max + int(length)),
        "b": (t_max - int(length), t_max),
        "c": (t_max - half, t_max - half + int(length)),
    }
    out = []
    for tag in SQM_PLACEMENTS:
        start, end = placements[tag]
        if start < int(p.t_start) or end > int(p.t_end):
            continue
        out.append(TestProcedure(
            id=f"{p.satellite_id}-SQM-p{pass_no:03d}-{tag}",
            proc_type=ProcedureType.SQM,
            t_start=Instant(start),
            t_end=Instant(end),
            config_time=config_time,
            sat_pass=p,
        ))
    return out


def _riot_candidate(p: SatellitePass, pass_no: int, config_time: Duration) -> TestProcedure:
    return TestProcedure(
        id=f"{p.satellite_id}-RIOT-p{pass_no:03d}",
        proc_type=ProcedureType.RIOT,
        t_start=p.t_start,
        t_end=p.t_end,
        config_time=config_time,
        sat_pass=p,
    )


def generate_candidates(catalog: PassCatalog, spec: CampaignSpec) -> CandidateSet:
    """
    Emit every candidate procedure for the campaign's requirements.

    :raises ConfigurationError: if the catalog belongs to another site
    :raises InfeasibleScenarioError: if a requirement gets no candidate
    """
    if catalog.site_id != spec.site_id:
        raise ConfigurationError(
            f"pass catalog is for site {catalog.site_id!r}, campaign is for {spec.site_id!r}"
        )
    t_sc, t_se = spec.window
    config_time = Duration.from_minutes(spec.config_time_minutes)
    sqm_length = Duration.from_minutes(spec.sqm_duration_minutes)
    edge = spec.riot_max_edge_elevation_deg

    grouped = catalog.by_satellite()
    candidates: List[TestProcedure] = []
    options: List[Tuple[int, ...]] = []
    missing: List[Requirement] = []

    for req in spec.requirements:
        passes = grouped.get(req.satellite_id, [])
        own: List[TestProcedure] = []
        for pass_no, p in enumerate(passes, start=1):
            if p.t_start < t_sc or p.t_end > t_se:
                continue
            if req.proc_type is ProcedureType.SQM:
                own.extend(_sqm_candidates(p, pass_no, sqm_length, config_time))
            elif p.theta_start <= edge and p.theta_end <= edge:
                own.append(_riot_candidate(p, pass_no, config_time))
        if not own:
            missing.append(req)
        first = len(candidates)
        candidates.extend(own)
        options.append(tuple(range(first, len(candidates))))
        log.debug(f"{req}: {len(own)} candidates from {len(passes)} passes")

    if missing:
        err = InfeasibleScenarioError(missing)
        log.error(str(err))
        raise err

    cands = CandidateSet(candidates=tuple(candidates), requirements=tuple(spec.requirements),
                         options=tuple(options))
    log.info(f"Generated {len(cands)} candidates for {cands.n_requirements} requirements")
    return cands


def candidate_frame_rows(cands: CandidateSet) -> Sequence[Dict[str, object]]:
    """Flat records for the `candidates` dump."""
    rows = []
    for i, c in enumerate(cands.candidates):
        rows.append({
            "index": i,
            "id": c.id,
            "type": c.proc_type.value,
            "satellite": c.satellite_id,
            "t_start": c.t_start.to_iso(),
            "t_end": c.t_end.to_iso(),
            "config_minutes": c.config_time.minutes,
            "requirement": int(cands.requirement_of[i]),
        })
    return rows
