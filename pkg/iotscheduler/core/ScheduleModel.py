"""
ScheduleModel.py

Domain values shared by every other module: time arithmetic (Instant,
Duration), satellite passes, test procedures, procedure / slot schedules and
the span computations built on them.

Times are integer UTC seconds since the Unix epoch. Instant and Duration are
int subclasses so the hot paths (conflicts, slotting, fitness) can do plain
integer arithmetic on them, while the public API still refuses reversed
intervals.
"""

from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, Iterator, List, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic_core import core_schema

from iotscheduler.core.Exceptions import (
    EmptyScheduleError,
    InvalidIntervalError,
)


# -------------------------------------------------------------------------
# Time arithmetic
# -------------------------------------------------------------------------

class Duration(int):
    """Non-negative number of seconds."""

    __slots__ = ()

    def __new__(cls, seconds: Union[int, float] = 0):
        value = int(round(seconds))
        if value < 0:
            raise InvalidIntervalError(f"Duration cannot be negative (got {value} s)")
        return super().__new__(cls, value)

    @classmethod
    def from_minutes(cls, minutes: Union[int, float]) -> "Duration":
        return cls(minutes * 60)

    @property
    def seconds(self) -> int:
        return int(self)

    @property
    def minutes(self) -> float:
        return int(self) / 60.0

    def __add__(self, other):
        if isinstance(other, Duration):
            return Duration(int(self) + int(other))
        return int(self) + other

    def __repr__(self) -> str:
        return f"Duration({int(self)})"

    @classmethod
    def __get_pydantic_core_schema__(cls, source: Any, handler: Any):
        return core_schema.no_info_plain_validator_function(
            _coerce_duration,
            serialization=core_schema.plain_serializer_function_ser_schema(int),
        )


class Instant(int):
    """A point in time, integer seconds since 1970-01-01T00:00:00Z."""

    __slots__ = ()

    def __new__(cls, epoch_seconds: Union[int, float]):
        return super().__new__(cls, int(epoch_seconds))

    @classmethod
    def from_iso(cls, text: str) -> "Instant":
        """Parse ISO-8601; a trailing Z or a naive timestamp both mean UTC."""
        stamp = datetime.fromisoformat(text.strip().replace("Z", "+00:00"))
        if stamp.tzinfo is None:
            stamp = stamp.replace(tzinfo=timezone.utc)
        return cls(int(stamp.timestamp()))

    @classmethod
    def from_datetime(cls, stamp: datetime) -> "Instant":
        if stamp.tzinfo is None:
            stamp = stamp.replace(tzinfo=timezone.utc)
        return cls(int(stamp.timestamp()))

    @property
    def epoch_seconds(self) -> int:
        return int(self)

    def to_iso(self) -> str:
        return datetime.fromtimestamp(int(self), tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")

    def __sub__(self, other):
        # Instant - Instant is a Duration, Instant - Duration is an Instant
        if isinstance(other, Instant):
            return delta_time(other, self)
        return Instant(int(self) - int(other))

    def __add__(self, other):
        if isinstance(other, Instant):
            raise TypeError("cannot add two Instants")
        return Instant(int(self) + int(other))

    __radd__ = __add__

    def __repr__(self) -> str:
        return f"Instant({self.to_iso()})"

    @classmethod
    def __get_pydantic_core_schema__(cls, source: Any, handler: Any):
        # JSON dumps use ISO-8601, python dumps keep the int
        return core_schema.no_info_plain_validator_function(
            _coerce_instant,
            serialization=core_schema.plain_serializer_function_ser_schema(
                lambda v: Instant(v).to_iso(), when_used="json"
            ),
        )


def _coerce_instant(value: Any) -> Instant:
    if isinstance(value, Instant):
        return value
    if isinstance(value, datetime):
        return Instant.from_datetime(value)
    if isinstance(value, str):
        return Instant.from_iso(value)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"cannot interpret {value!r} as an Instant")
    return Instant(value)


def _coerce_duration(value: Any) -> Duration:
    if isinstance(value, Duration):
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"cannot interpret {value!r} as a Duration")
    return Duration(value)


def delta_time(a: Instant, b: Instant) -> Duration:
    """
    Elapsed time from a to b.

    :raises InvalidIntervalError: if b precedes a
    """
    if int(b) < int(a):
        raise InvalidIntervalError(
            f"invalid interval: end {Instant(b).to_iso()} precedes start {Instant(a).to_iso()}"
        )
    return Duration(int(b) - int(a))


# -------------------------------------------------------------------------
# Passes
# -------------------------------------------------------------------------

_FROZEN = ConfigDict(frozen=True)


class SatellitePass(BaseModel):
    """One visibility window of a satellite over a ground site."""

    model_config = _FROZEN

    satellite_id: str
    site_id: str
    t_start: Instant
    t_max: Instant
    t_end: Instant
    theta_start: float = Field(ge=0.0, le=90.0)
    theta_max: float = Field(ge=0.0, le=90.0)
    theta_end: float = Field(ge=0.0, le=90.0)
    phi_start: float = Field(ge=0.0, lt=360.0)
    phi_max: float = Field(ge=0.0, lt=360.0)
    phi_end: float = Field(ge=0.0, lt=360.0)

    @model_validator(mode="after")
    def _check_pass(self) -> "SatellitePass":
        if not self.t_start < self.t_max:
            raise ValueError(
                f"t_start < t_max violated ({self.t_start.to_iso()} >= {self.t_max.to_iso()})"
            )
        if not self.t_max < self.t_end:
            raise ValueError(
                f"t_max < t_end violated ({self.t_max.to_iso()} >= {self.t_end.to_iso()})"
            )
        if self.theta_max < self.theta_start or self.theta_max < self.theta_end:
            raise ValueError(
                "theta_max must be >= theta_start and theta_end "
                f"(got {self.theta_start}/{self.theta_max}/{self.theta_end})"
            )
        return self

    @property
    def label(self) -> str:
        return f"{self.satellite_id}@{self.t_start.to_iso()}"

    @property
    def duration(self) -> Duration:
        return delta_time(self.t_start, self.t_end)


class PassCatalog(BaseModel):
    """Every pass of every satellite over one site within a window."""

    model_config = _FROZEN

    site_id: str
    window: Tuple[Instant, Instant]
    passes: Tuple[SatellitePass, ...] = ()

    @model_validator(mode="after")
    def _check_catalog(self) -> "PassCatalog":
        lo, hi = self.window
        if hi < lo:
            raise ValueError("catalog window end precedes its start")
        for p in self.passes:
            if p.site_id != self.site_id:
                raise ValueError(f"pass {p.label} belongs to site {p.site_id!r}, not {self.site_id!r}")
            if p.t_start < lo or p.t_end > hi:
                raise ValueError(f"pass {p.label} lies outside the catalog window")
        return self

    @property
    def satellites(self) -> List[str]:
        return sorted({p.satellite_id for p in self.passes})

    def by_satellite(self) -> Dict[str, List[SatellitePass]]:
        grouped: Dict[str, List[SatellitePass]] = {}
        for p in sorted(self.passes, key=lambda q: (q.satellite_id, int(q.t_start))):
            grouped.setdefault(p.satellite_id, []).append(p)
        return grouped

    def __len__(self) -> int:
        return len(self.passes)


# -------------------------------------------------------------------------
# Procedures
# -------------------------------------------------------------------------

class ProcedureType(str, Enum):
    SQM = "SQM"
    RIOT = "RIOT"

    def __str__(self) -> str:
        return self.value


class TestProcedure(BaseModel):
    """A typed test bound to one pass, with the configuration time it needs first."""

    __test__ = False  # not a pytest class

    model_config = _FROZEN

    id: str
    proc_type: ProcedureType
    t_start: Instant
    t_end: Instant
    config_time: Duration = Duration(0)
    sat_pass: SatellitePass

    @model_validator(mode="after")
    def _check_procedure(self) -> "TestProcedure":
        if not self.t_start < self.t_end:
            raise ValueError(f"procedure {self.id}: t_start < t_end violated")
        if self.t_start < self.sat_pass.t_start or self.t_end > self.sat_pass.t_end:
            raise ValueError(f"procedure {self.id} does not lie inside pass {self.sat_pass.label}")
        return self

    @property
    def satellite_id(self) -> str:
        return self.sat_pass.satellite_id

    @property
    def requirement_key(self) -> Tuple[str, ProcedureType]:
        return (self.sat_pass.satellite_id, self.proc_type)

    @property
    def duration(self) -> Duration:
        return delta_time(self.t_start, self.t_end)


class ProcedureSchedule(BaseModel):
    """S: the selected procedures, at most one per (type, satellite)."""

    model_config = _FROZEN

    procedures: Tuple[TestProcedure, ...] = ()

    @model_validator(mode="after")
    def _check_schedule(self) -> "ProcedureSchedule":
        ids = set()
        keys = set()
        for p in self.procedures:
            if p.id in ids:
                raise ValueError(f"procedure id {p.id} appears twice in the schedule")
            if p.requirement_key in keys:
                raise ValueError(
                    f"two procedures share ({p.proc_type}, {p.satellite_id}) in the schedule"
                )
            ids.add(p.id)
            keys.add(p.requirement_key)
        return self

    def __len__(self) -> int:
        return len(self.procedures)

    def __iter__(self) -> Iterator[TestProcedure]:  # type: ignore[override]
        return iter(self.procedures)

    @property
    def ids(self) -> List[str]:
        return [p.id for p in self.procedures]


# -------------------------------------------------------------------------
# Slots
# -------------------------------------------------------------------------

class Slot(BaseModel):
    """One antenna allotment interval."""

    model_config = _FROZEN

    t_start: Instant
    t_end: Instant

    @model_validator(mode="after")
    def _check_slot(self) -> "Slot":
        if not self.t_start < self.t_end:
            raise ValueError("slot: t_start < t_end violated")
        return self

    @property
    def duration(self) -> Duration:
        return Duration(int(self.t_end) - int(self.t_start))

    def contains(self, start: int, end: int) -> bool:
        return int(self.t_start) <= int(start) and int(end) <= int(self.t_end)


class SlotSchedule(BaseModel):
    """Q: chronologically sorted, pairwise non-overlapping slots."""

    model_config = _FROZEN

    slots: Tuple[Slot, ...] = ()

    @model_validator(mode="after")
    def _check_slots(self) -> "SlotSchedule":
        for prev, nxt in zip(self.slots, self.slots[1:]):
            if nxt.t_start < prev.t_end:
                raise ValueError("slot schedule must be sorted and non-overlapping")
        return self

    def __len__(self) -> int:
        return len(self.slots)

    def __iter__(self) -> Iterator[Slot]:  # type: ignore[override]
        return iter(self.slots)


class IotSchedule(BaseModel):
    """
    A procedure schedule and its slots. Every procedure lies inside some slot,
    together with its configuration time when cover_config_time is set.
    """

    model_config = _FROZEN

    procedures: ProcedureSchedule
    slots: SlotSchedule
    cover_config_time: bool = True

    @model_validator(mode="after")
    def _check_coverage(self) -> "IotSchedule":
        for p in self.procedures:
            start = int(p.t_start) - (int(p.config_time) if self.cover_config_time else 0)
            if not any(q.contains(start, p.t_end) for q in self.slots):
                raise ValueError(f"procedure {p.id} is not covered by any slot")
        return self


# -------------------------------------------------------------------------
# Spans
# -------------------------------------------------------------------------

def span_pair(ti: TestProcedure, tj: TestProcedure) -> Duration:
    """Elapsed time from the start of ti to the end of tj."""
    if int(tj.t_end) < int(ti.t_start):
        raise InvalidIntervalError(
            f"invalid order: {tj.id} ends before {ti.id} starts"
        )
    return delta_time(ti.t_start, tj.t_end)


def span_schedule(s: ProcedureSchedule) -> Duration:
    """Elapsed time from the first procedure start to the last procedure end."""
    if len(s) == 0:
        raise EmptyScheduleError("span of an empty procedure schedule is undefined")
    first = min(int(p.t_start) for p in s.procedures)
    last = max(int(p.t_end) for p in s.procedures)
    return Duration(last - first)
