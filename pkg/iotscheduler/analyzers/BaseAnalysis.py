from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from iotscheduler.controllers.logging_utils import get_logger
from iotscheduler.core.Exceptions import ConfigurationError

PathLike = Union[str, Path]


class BaseAnalysis(ABC):
    """
    Post-run analysis over one or more optimizer outputs.

    run_all() is load → prepare → compute → summarize → export; export only
    runs when an out_dir was given. Problems that should not stop the analysis
    (an empty front, a comparison without enough runs) go to `notices`.
    """
    def __init__(
        self,
        inputs: Union[PathLike, Sequence[PathLike]],
        out_dir: Optional[PathLike] = None,
        verbose: bool = False,
        debug: bool = False,
    ):
        if isinstance(inputs, (str, Path)):
            inputs = [inputs]
        self.inputs: List[Path] = [Path(p) for p in inputs]
        if not self.inputs:
            raise ConfigurationError(f"{self.__class__.__name__} needs at least one input")
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.verbose = verbose
        self.log = get_logger(self.__class__.__name__, debug)
        self.notices: List[str] = []

        self.raw = None          # loaded run outputs
        self.processed = None    # per-run inputs to compute()
        self.results = None      # frames / values
        self.summary = None      # console tables

    def run_all(self) -> Dict[str, Any]:
        self.notices.clear()
        self.load()
        self.prepare()
        self.compute()
        self.summarize()
        if self.out_dir is not None:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            self.export()
        return self.result()

    def notice(self, msg: str) -> None:
        self.notices.append(msg)
        self.log.warning(msg)

    @abstractmethod
    def load(self) -> None:
        """Read every input into self.raw."""

    @abstractmethod
    def prepare(self) -> None:
        ...

    @abstractmethod
    def compute(self) -> None:
        ...

    def summarize(self) -> None:
        return None

    @abstractmethod
    def export(self) -> None:
        """Write self.results below self.out_dir (created by run_all)."""

    def result(self) -> Dict[str, Any]:
        return {
            "raw": self.raw,
            "processed": self.processed,
            "results": self.results,
            "summary": self.summary,
            "notices": list(self.notices),
        }
