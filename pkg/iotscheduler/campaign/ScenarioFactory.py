"""
ScenarioFactory.py

Assembles everything an optimizer needs from a pass catalog and a campaign:
the candidate set, the conflict graph and a cost model with bounds. Also
builds seeded synthetic campaigns for tests, scripts and the `synth` command.
"""

from dataclasses import dataclass
from datetime import timedelta
from typing import Optional, Tuple

import numpy as np

from iotscheduler.campaign.CandidateGenerator import CandidateSet, generate_candidates
from iotscheduler.campaign.PassSynthesizer import satellite_ids, synth_passes
from iotscheduler.constraints.ConflictGraph import ConflictGraph, build_graph
from iotscheduler.controllers.logging_utils import get_logger
from iotscheduler.core.CampaignConfig import (
    CampaignSpec,
    CostModel,
    Requirement,
    SlottingPolicy,
    SynthParams,
)
from iotscheduler.core.Exceptions import ConfigurationError
from iotscheduler.core.ScheduleModel import Duration, Instant, PassCatalog, ProcedureType
from iotscheduler.objectives.FitnessFunctions import FitnessVector, derive_cost_bounds, evaluate_indices

log = get_logger("ScenarioFactory")

DEFAULT_START = "2024-03-04T00:00:00Z"


@dataclass(frozen=True)
class Scenario:
    """Immutable problem instance shared by every optimizer run."""

    spec: CampaignSpec
    catalog: PassCatalog
    candidates: CandidateSet
    graph: ConflictGraph
    cost_model: CostModel

    @property
    def policy(self) -> SlottingPolicy:
        return self.spec.slotting

    @property
    def delta_c(self) -> int:
        return int(Duration.from_minutes(self.spec.config_time_minutes))

    @property
    def n_requirements(self) -> int:
        return self.candidates.n_requirements

    def evaluate(self, idx: np.ndarray) -> FitnessVector:
        """Raw evaluation of a candidate-index schedule (no penalty)."""
        return evaluate_indices(idx, self.candidates, self.graph, self.policy,
                                self.cost_model, self.delta_c)

    @classmethod
    def build(cls, catalog: PassCatalog, spec: CampaignSpec) -> "Scenario":
        cands = generate_candidates(catalog, spec)
        graph = build_graph(cands)
        cost_model = derive_cost_bounds(cands, spec.slotting, spec.cost_model)
        log.info(f"Scenario ready: {len(catalog)} passes, {len(cands)} candidates, "
                 f"{graph.n_edges} conflicts, {cands.n_requirements} requirements")
        return cls(spec=spec, catalog=catalog, candidates=cands, graph=graph,
                   cost_model=cost_model)


def build_synthetic_campaign(seed: int, n_sats: int, days: float, riot_sats: int,
                             start: str = DEFAULT_START,
                             params: Optional[SynthParams] = None,
                             **spec_fields) -> Tuple[PassCatalog, CampaignSpec]:
    """
    Synthetic passes plus a campaign asking SQM of every satellite and RIOT of
    the first `riot_sats` (which are the ones given low-edge passes).

    :param spec_fields: extra CampaignSpec fields (config_time_minutes, cost_model, ...)
    """
    if not 0 <= riot_sats <= n_sats:
        raise ConfigurationError(f"riot_sats must lie in [0, {n_sats}] (got {riot_sats})")
    t0 = Instant.from_iso(start)
    t1 = Instant(int(t0) + int(timedelta(days=days).total_seconds()))

    base = params or SynthParams()
    params = base.model_copy(update={"riot_fraction": riot_sats / n_sats}) if n_sats else base
    catalog = synth_passes(seed, n_sats, (t0, t1), params)

    sats = satellite_ids(n_sats)
    requirements = [Requirement(satellite_id=s, proc_type=ProcedureType.SQM) for s in sats]
    requirements += [Requirement(satellite_id=s, proc_type=ProcedureType.RIOT) for s in sats[:riot_sats]]
    spec = CampaignSpec(
        site_id=params.site_id,
        window=(t0, t1),
        satellites=sats,
        requirements=requirements,
        riot_max_edge_elevation_deg=params.riot_edge_max_deg,
        **spec_fields,
    )
    return catalog, spec


def build_synthetic_scenario(seed: int, n_sats: int = 6, days: float = 3.0, riot_sats: int = 2,
                             **kwargs) -> Scenario:
    catalog, spec = build_synthetic_campaign(seed, n_sats, days, riot_sats, **kwargs)
    return Scenario.build(catalog, spec)
