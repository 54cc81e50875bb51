from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from iotscheduler.core.ScheduleModel import Instant, ProcedureType

#   Pydantic BaseModels give every component the same validated config object;
# without it each optimizer/scenario loader would repeat its own input checks.
#   Models that are only read after construction are frozen.


class Requirement(BaseModel):
    """One {Type, s} combination the campaign must cover."""

    model_config = ConfigDict(frozen=True)

    satellite_id: str
    proc_type: ProcedureType

    @property
    def key(self) -> Tuple[str, ProcedureType]:
        return (self.satellite_id, self.proc_type)

    def __str__(self) -> str:
        return f"{self.proc_type.value}/{self.satellite_id}"


class CostModel(BaseModel):
    """
    Slot cost: span/60 × rate_per_hour below day_threshold_minutes, a flat
    day_cap_cost otherwise. cost_min / cost_max normalize the cost objective; leave them
    unset to derive them from the candidate set.
    """

    model_config = ConfigDict(frozen=True)

    rate_per_hour: float = Field(default=456.0, gt=0)
    day_cap_cost: float = Field(default=3561.0, gt=0)
    day_threshold_minutes: int = Field(default=1440, gt=0)
    cost_min: Optional[float] = None
    cost_max: Optional[float] = None

    @model_validator(mode="after")
    def _check_bounds(self) -> "CostModel":
        if self.cost_min is not None and self.cost_max is not None:
            if not self.cost_min < self.cost_max:
                raise ValueError("cost_min must be < cost_max")
        return self

    @property
    def has_bounds(self) -> bool:
        return self.cost_min is not None and self.cost_max is not None


class SlottingPolicy(BaseModel):
    """Alignment, quantization and consolidation rules for slot generation."""

    model_config = ConfigDict(frozen=True)

    align_minutes: int = Field(default=15, gt=0)
    slot_quantum_minutes: int = Field(default=60, gt=0)
    consolidation_threshold_minutes: int = Field(default=360, gt=0)
    consolidation_window_minutes: int = Field(default=1440, gt=0)
    cover_config_time: bool = True

    @model_validator(mode="after")
    def _check_policy(self) -> "SlottingPolicy":
        if self.slot_quantum_minutes % self.align_minutes != 0:
            raise ValueError("align_minutes must divide slot_quantum_minutes")
        if not self.consolidation_threshold_minutes < self.consolidation_window_minutes:
            raise ValueError("consolidation threshold must be shorter than its window")
        return self


class CampaignSpec(BaseModel):
    """What the campaign must test, where, when, and how it is priced."""

    model_config = ConfigDict(frozen=True)

    site_id: str
    window: Tuple[Instant, Instant]
    satellites: List[str]
    requirements: List[Requirement]
    config_time_minutes: int = Field(default=15, ge=0)
    sqm_duration_minutes: int = Field(default=45, gt=0)
    riot_max_edge_elevation_deg: float = Field(default=5.0, ge=0, le=90)
    cost_model: CostModel = CostModel()
    slotting: SlottingPolicy = SlottingPolicy()

    @model_validator(mode="after")
    def _check_campaign(self) -> "CampaignSpec":
        t_sc, t_se = self.window
        if not t_sc < t_se:
            raise ValueError("campaign window: t_sc < t_se violated")
        known = set(self.satellites)
        seen = set()
        for req in self.requirements:
            if req.satellite_id not in known:
                raise ValueError(f"requirement {req} names unknown satellite {req.satellite_id!r}")
            if req.key in seen:
                raise ValueError(f"requirement {req} listed twice")
            seen.add(req.key)
        if not self.requirements:
            raise ValueError("a campaign needs at least one requirement")
        return self

    @classmethod
    def from_json_file(cls, path: Path) -> "CampaignSpec":
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))


class SearchConfig(BaseModel):
    """NSGA-III and random-search settings."""

    model_config = ConfigDict(frozen=True)

    population_size: int = Field(default=200, ge=4)
    reference_point_count: Optional[int] = Field(default=None, ge=3)
    reference_point_method: Literal["energy", "das-dennis"] = "energy"
    crossover_prob: float = Field(default=0.8, ge=0, le=1)
    mutation_prob: float = Field(default=0.2, ge=0, le=1)
    p_nc_min: float = Field(default=0.5, ge=0, le=1)
    p_nc_max: float = Field(default=0.95, ge=0, le=1)
    eval_budget: int = Field(default=50000, gt=0)
    wallclock_cap_seconds: float = Field(default=3600, gt=0)
    rng_seed: int = 0
    workers: int = Field(default=1, ge=1)
    log_every: int = Field(default=10, ge=1)

    @model_validator(mode="after")
    def _check_search(self) -> "SearchConfig":
        if self.p_nc_min > self.p_nc_max:
            raise ValueError("p_nc_min must be <= p_nc_max")
        return self

    @property
    def n_reference_points(self) -> int:
        return self.reference_point_count or max(3, self.population_size // 2)


class AcoConfig(BaseModel):
    """MMAS settings. tau_min / tau_max default to deposit/rho and tau_max/(2·|T|)."""

    model_config = ConfigDict(frozen=True)

    ants: int = Field(default=50, ge=1)
    alpha: float = Field(default=1.0, ge=0)
    beta: float = Field(default=1.0, ge=0)
    rho: float = Field(default=0.5, gt=0, lt=1)
    deposit: float = Field(default=100.0, gt=0)
    tau_min: Optional[float] = Field(default=None, gt=0)
    tau_max: Optional[float] = Field(default=None, gt=0)
    heuristic_floor: float = Field(default=1e-6, gt=0)
    eval_budget: int = Field(default=50000, gt=0)
    wallclock_cap_seconds: float = Field(default=3600, gt=0)
    rng_seed: int = 0
    workers: int = Field(default=1, ge=1)
    log_every: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _check_trail_bounds(self) -> "AcoConfig":
        if self.tau_min is not None and self.tau_max is not None:
            if not self.tau_min < self.tau_max:
                raise ValueError("tau_min must be < tau_max")
        return self

    def trail_bounds(self, n_candidates: int) -> Tuple[float, float]:
        tau_max = self.tau_max if self.tau_max is not None else self.deposit / self.rho
        tau_min = self.tau_min if self.tau_min is not None else tau_max / (2.0 * max(1, n_candidates))
        return tau_min, tau_max


class SynthParams(BaseModel):
    """Knobs of the synthetic pass generator (orbital-period-like, not orbital mechanics)."""

    model_config = ConfigDict(frozen=True)

    site_id: str = "GS01"
    period_hours: float = Field(default=8.0, gt=0)
    period_jitter: float = Field(default=0.05, ge=0, lt=0.5)
    pass_minutes_min: float = Field(default=120.0, gt=0)
    pass_minutes_max: float = Field(default=240.0, gt=0)
    riot_fraction: float = Field(default=0.5, ge=0, le=1)
    riot_edge_max_deg: float = Field(default=5.0, ge=0, le=10)
    theta_max_range: Tuple[float, float] = (10.0, 90.0)

    @model_validator(mode="after")
    def _check_synth(self) -> "SynthParams":
        if self.pass_minutes_min > self.pass_minutes_max:
            raise ValueError("pass_minutes_min must be <= pass_minutes_max")
        if self.pass_minutes_max >= self.period_hours * 60 * (1 - self.period_jitter):
            raise ValueError("passes must be shorter than the (jittered) period")
        lo, hi = self.theta_max_range
        if not 10.0 <= lo <= hi <= 90.0:
            raise ValueError("theta_max_range must lie within [10, 90]")
        return self


ALGORITHMS = ("nsga3", "rs", "aco")


class RunManifest(BaseModel):
    """Everything needed to reproduce one optimize run byte-for-byte."""

    model_config = ConfigDict(frozen=True)

    scenario_path: Path
    passes_path: Path
    algorithm: Literal["nsga3", "rs", "aco"]
    overrides: Dict[str, Any] = {}
    seed: int = 0
    output_dir: Path

    @field_validator("scenario_path", "passes_path")
    @classmethod
    def _must_exist(cls, value: Path) -> Path:
        if not Path(value).exists():
            raise ValueError(f"file not found: {value}")
        return value

    def optimizer_config(self) -> Dict[str, Any]:
        """Raw config dict for the chosen optimizer, seed included."""
        raw = dict(self.overrides)
        raw["rng_seed"] = self.seed
        return raw
