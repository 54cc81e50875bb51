import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from iotscheduler.controllers.logging_utils import get_logger, telemetry_line
from iotscheduler.core.CampaignConfig import SearchConfig

if TYPE_CHECKING:
    from iotscheduler.campaign.ScenarioFactory import Scenario
    from iotscheduler.objectives.FitnessFunctions import FitnessVector
    from iotscheduler.optimizers.ParetoArchive import ParetoArchive, ArchiveEntry


@dataclass
class OptimizationResult:
    """What every optimizer hands back: the reported archive plus run telemetry."""

    algorithm: str
    archive: "ParetoArchive"
    telemetry: List[Dict[str, Any]]
    evals: int
    iterations: int
    stop_reason: str
    best: Optional["ArchiveEntry"] = None
    extras: Dict[str, Any] = field(default_factory=dict)

    @property
    def feasible_found(self) -> bool:
        return self.archive.has_feasible

    def telemetry_document(self) -> Dict[str, Any]:
        # no wall-clock values: the document must be reproducible
        return {
            "algorithm": self.algorithm,
            "evals": self.evals,
            "iterations": self.iterations,
            "stop_reason": self.stop_reason,
            "records": self.telemetry,
        }


class BaseOptimizer(ABC):
    """
    Abstract base class for all schedule optimizers.

    example usage:

    # MyOptimizer.py
    class MyOptimizer(BaseOptimizer):
        algorithm = "mine"
        def _run(self) -> OptimizationResult:
            ...

    # optimize.py
    with MyOptimizer.start_optimizer(raw_cfg, scenario) as opt:
        result = opt.run()
    """

    ConfigModel = SearchConfig
    algorithm = "base"

    @classmethod
    def start_optimizer(
        cls,
        raw_cfg: Dict[str, Any],
        context: "Scenario",
        debug: bool = False,
        **kwargs: Any
    ) -> "BaseOptimizer":
        """
            This is a factory method: it validates a raw config dict, instantiates the optimizer, and returns it.

            :param raw_cfg: Raw settings (JSON/CLI overrides)
            :param context: the Scenario to optimize
            :param debug: Enable optimizer-level debug logging
            :param kwargs: Additional keyword args for optimizer __init__
            :return: An instance of the optimizer subclass
        """
        configs = cls.ConfigModel(**raw_cfg)
        return cls(configs, context, debug=debug, **kwargs)

    def __init__(
        self,
        cfg: BaseModel,
        scenario: "Scenario",
        debug: bool = False,
        **kwargs: Any
    ):
        """
            :param cfg: Validated SearchConfig / AcoConfig instance
            :param scenario: problem instance (candidates, conflict graph, cost model)
            :param debug: Enable debug logging
            :param kwargs: Extra attributes to inject via set_default_attrs
        """
        self.configs = cfg
        self.scenario = scenario
        self.debug = debug
        self.log = get_logger(self.__class__.__name__, self.debug)

        self.rng = np.random.default_rng(cfg.rng_seed)
        self.evals = 0
        self.iteration = 0
        self.telemetry: List[Dict[str, Any]] = []
        self.stop_reason = "not started"
        self._t0: Optional[float] = None
        self._pool: Optional[ThreadPoolExecutor] = None

        self.set_default_attrs(**kwargs)
        self.log.info(f"Initializing {self.algorithm}: seed={cfg.rng_seed}, "
                      f"eval_budget={cfg.eval_budget}, wallclock={cfg.wallclock_cap_seconds}s, "
                      f"workers={cfg.workers}")

    # --- budget accounting ---

    @property
    def elapsed(self) -> float:
        return 0.0 if self._t0 is None else time.perf_counter() - self._t0

    @property
    def remaining_evals(self) -> int:
        return max(0, self.configs.eval_budget - self.evals)

    def out_of_budget(self) -> bool:
        if self.remaining_evals == 0:
            self.stop_reason = "eval_budget"
            return True
        if self.elapsed >= self.configs.wallclock_cap_seconds:
            self.stop_reason = "wallclock"
            return True
        return False

    # --- evaluation ---

    def evaluate_batch(self, schedules: Sequence[np.ndarray]) -> List["FitnessVector"]:
        """
        Raw-evaluate candidate-index schedules in order. Never exceeds the
        evaluation budget: the batch is truncated to what is left, so the
        returned list may be shorter than `schedules`.
        """
        batch = list(schedules)[: self.remaining_evals]
        if not batch:
            return []
        if self.configs.workers > 1:
            if self._pool is None:
                self._pool = ThreadPoolExecutor(max_workers=self.configs.workers,
                                                thread_name_prefix=self.algorithm)
            # map() yields in submission order, so results never depend on scheduling
            results = list(self._pool.map(self.scenario.evaluate, batch))
        else:
            results = [self.scenario.evaluate(idx) for idx in batch]
        self.evals += len(results)
        return results

    # --- telemetry ---

    def record_telemetry(self, min_violations: int, mean_violations: float,
                         front_size: int, hv: float, **extra: Any) -> Dict[str, Any]:
        record = {
            "iteration": self.iteration,
            "evals": self.evals,
            "min_violations": int(min_violations),
            "mean_violations": round(float(mean_violations), 6),
            "front_size": int(front_size),
            "hv": round(float(hv), 9),
        }
        record.update(extra)
        self.telemetry.append(record)
        if self.iteration % self.configs.log_every == 0:
            self.log.info(telemetry_line(self.algorithm, record))
        return record

    # --- run template ---

    def run(self) -> OptimizationResult:
        """Start the clock, run the algorithm, log the outcome."""
        self._t0 = time.perf_counter()
        self.stop_reason = "running"
        self.log.info(f"Starting {self.algorithm} on {self.scenario.n_requirements} requirements, "
                      f"{len(self.scenario.candidates)} candidates")
        try:
            result = self._run()
        except Exception as e:
            self.log.error(f"{self.algorithm} failed after {self.evals} evaluations: {e}")
            raise
        self.log.info(
            f"Finished {self.algorithm}: {result.evals} evals, {result.iterations} iterations, "
            f"stop={result.stop_reason}, front={len(result.archive)}, "
            f"feasible={result.feasible_found}, elapsed={self.elapsed:.1f}s"
        )
        return result

    @abstractmethod
    def _run(self) -> OptimizationResult:
        """Algorithm body; must respect out_of_budget()."""

    def _result(self, archive: "ParetoArchive", best: Optional["ArchiveEntry"] = None,
                **extras: Any) -> OptimizationResult:
        return OptimizationResult(
            algorithm=self.algorithm,
            archive=archive,
            telemetry=self.telemetry,
            evals=self.evals,
            iterations=self.iteration,
            stop_reason=self.stop_reason,
            best=best,
            extras=extras,
        )

    def close(self) -> None:
        """ Release the evaluation worker pool. """
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None
            self.log.debug("Evaluation pool closed.")

    # --- with optimizer as xxx methods ---
    def __enter__(self) -> "BaseOptimizer":
        return self

    def __exit__(self, exc_type: type, exc_val: Exception, exc_tb: Any) -> bool:
        self.close()
        return False

    def set_default_attrs(self, **kwargs):
        """Set and log extra attributes."""
        for k, v in kwargs.items():
            setattr(self, k, v)
            self.log.debug(f"Set attribute {k}={v}")
