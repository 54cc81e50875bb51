import json
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd
from tabulate import tabulate

from iotscheduler.controllers.logging_utils import get_logger
from iotscheduler.core.Exceptions import SchedulingError

if TYPE_CHECKING:
    from iotscheduler.campaign.ScenarioFactory import Scenario
    from iotscheduler.core.BaseOptimizer import OptimizationResult

log = get_logger("DataStorage")

ARCHIVE_FILE = "archive.json"
TELEMETRY_FILE = "telemetry.json"
MANIFEST_FILE = "manifest.json"

GANTT_COLUMNS = ["slot_start", "slot_end", "procedures"]
PROCEDURE_COLUMNS = ["slot", "procedure", "type", "satellite", "t_start", "t_end", "config_minutes"]
# procedure ids inside one Gantt cell
PROCEDURE_SEP = ";"


class IOHelper:
    """
    Mixin providing low-level I/O helpers for saving JSON and CSV.
    Expects a `self.base_path: Path` attribute. Output is deterministic:
    sorted keys, fixed indentation, '\\n' line endings.
    """
    def save_json(self, obj, fname: str) -> Path:
        out = self.base_path / fname
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            json.dump(obj, f, default=str, indent=2, sort_keys=True)
            f.write("\n")
        return out

    def save_csv(self, frame: pd.DataFrame, fname: str) -> Path:
        out = self.base_path / fname
        frame.to_csv(out, index=False, lineterminator="\n")
        return out


@dataclass
class Importer(IOHelper):
    """
    Loads an archive JSON into .data (entries) and .metadata (algorithm,
    seed, counts), and provides the front view the indicators need. Exporter
    writes an object wrapping "entries"; a bare list of entries also loads,
    with no metadata.
    """
    data: dict
    metadata: dict
    base_path: Path

    @classmethod
    def load_archive(cls, path: Union[str, Path], verbose: bool = False) -> "Importer":
        path = Path(path)
        if path.is_dir():
            path = path / ARCHIVE_FILE
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise SchedulingError(f"{path}: not a valid archive JSON ({e})") from e
        if isinstance(doc, list):
            doc = {"entries": doc}
        if not isinstance(doc, dict) or "entries" not in doc:
            raise SchedulingError(f"{path}: archive JSON has no 'entries'")

        metadata = {k: v for k, v in doc.items() if k != "entries"}
        metadata.setdefault("source", str(path))
        raw = cls({"entries": doc["entries"]}, metadata, path.parent)
        if verbose:
            raw.print_summary()
        return raw

    @property
    def algorithm(self) -> str:
        return str(self.metadata.get("algorithm", "unknown"))

    @property
    def entries(self) -> List[Dict[str, Any]]:
        return self.data["entries"]

    def front_points(self, feasible_only: bool = True) -> np.ndarray:
        """Minimized objective vectors of the (feasible) entries."""
        rows = [e["fitness_minimized"] for e in self.entries
                if not feasible_only or e["fitness_raw"]["violations"] == 0]
        return np.array(rows, dtype=float) if rows else np.zeros((0, 3))

    def print_summary(self) -> None:
        rows = [[k, e["fitness_raw"]["violations"], *(f"{x:.4f}" for x in e["fitness_minimized"]),
                 len(e["slots"])] for k, e in enumerate(self.entries)]
        print(tabulate(rows, headers=["#", "Violations", "1-use", "1-frag", "cost", "Slots"],
                       tablefmt="github"))
        print()


class Exporter(IOHelper):
    """
    Uses IOHelper to write out a run: archive, telemetry, manifest and one
    slot schedule per archive entry.
    """
    def __init__(self, out_dir):
        self.base_path = Path(out_dir)
        self.base_path.mkdir(exist_ok=True, parents=True)

    def export_run(self, result: "OptimizationResult", scenario: "Scenario",
                   manifest: Optional[Dict[str, Any]] = None, seed: Optional[int] = None) -> List[Path]:
        records = result.archive.to_records(scenario.candidates, scenario.policy)
        doc = {
            "algorithm": result.algorithm,
            "seed": seed,
            "n_objectives": 3,
            "feasible": result.feasible_found,
            "evals": result.evals,
            "stop_reason": result.stop_reason,
            "entries": records,
        }
        written = [
            self.save_json(doc, ARCHIVE_FILE),
            self.save_json(result.telemetry_document(), TELEMETRY_FILE),
        ]
        if manifest is not None:
            written.append(self.save_json(manifest, MANIFEST_FILE))
        written += self.export_slots(records)
        log.info(f"Wrote {len(written)} files to {self.base_path}")
        return written

    def export_slots(self, records: List[Dict[str, Any]], prefix: str = "slots") -> List[Path]:
        """
        Per entry: the Gantt CSV (one row per slot), the slot JSON and a
        per-procedure table `<prefix>_<k>_procedures.csv`.
        """
        written = []
        for k, rec in enumerate(records):
            written.append(self.save_csv(gantt_frame(rec), f"{prefix}_{k:03d}.csv"))
            written.append(self.save_csv(procedure_frame(rec), f"{prefix}_{k:03d}_procedures.csv"))
            written.append(self.save_json(rec["slots"], f"{prefix}_{k:03d}.json"))
        return written


def gantt_frame(record: Dict[str, Any]) -> pd.DataFrame:
    """One row per slot of an archive record: its bounds and the procedures it holds."""
    rows = [[slot["t_start"], slot["t_end"], PROCEDURE_SEP.join(slot["procedures"])]
            for slot in record["slots"]]
    return pd.DataFrame(rows, columns=GANTT_COLUMNS)


def procedure_frame(record: Dict[str, Any]) -> pd.DataFrame:
    procs = {p["id"]: p for p in record["procedures"]}
    rows = []
    for k, slot in enumerate(record["slots"]):
        for pid in slot["procedures"]:
            p = procs[pid]
            rows.append([k, pid, p["type"], p["satellite"], p["t_start"], p["t_end"], p["config_minutes"]])
    return pd.DataFrame(rows, columns=PROCEDURE_COLUMNS)
