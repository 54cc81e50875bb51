"""
Exceptions.py

Error types raised across the scheduler. Each one also derives from the
closest builtin so callers that only know about ValueError / KeyError still
catch them.
"""

from typing import Any, Iterable, List, Optional


class SchedulingError(Exception):
    """Base class for every error raised by iotscheduler."""


class InvalidIntervalError(SchedulingError, ValueError):
    """An interval whose end precedes its start (or a reversed Δtime)."""


class EmptyScheduleError(SchedulingError, ValueError):
    """An operation that needs at least one procedure got none."""


class ConfigurationError(SchedulingError, ValueError):
    """A configuration value that validates on its own but cannot be used."""


class GenomeError(SchedulingError, ValueError):
    """A genome that does not fit the candidate set it is decoded against."""


class IndicatorError(SchedulingError, ValueError):
    """A quality indicator called on unusable fronts."""


class UnknownProcedureError(SchedulingError, KeyError):
    """A procedure id that is not a vertex of the conflict graph."""


class PassValidationError(SchedulingError, ValueError):
    """
    A pass record that could not be parsed or violates a pass invariant.

    :param message: what went wrong
    :param locator: line number (CSV) or record index (JSON), if known
    :param pass_label: human readable name of the offending pass
    """

    def __init__(self, message: str, locator: Optional[str] = None,
                 pass_label: Optional[str] = None):
        self.locator = locator
        self.pass_label = pass_label
        prefix = ""
        if locator:
            prefix += f"[{locator}] "
        if pass_label:
            prefix += f"pass {pass_label}: "
        super().__init__(prefix + message)


class InfeasibleScenarioError(SchedulingError, ValueError):
    """One or more requirements have no candidate procedure at all."""

    def __init__(self, requirements: Iterable[Any]):
        self.requirements: List[Any] = list(requirements)
        listing = ", ".join(str(r) for r in self.requirements)
        super().__init__(f"no candidate procedure for requirement(s): {listing}")
