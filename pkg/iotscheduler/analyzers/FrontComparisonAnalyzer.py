"""
FrontComparisonAnalyzer.py

Compares archives of several runs, grouped by algorithm label:
reference front over every input, GD / SP / HV per run, then a Mann-Whitney
U-test and Vargha-Delaney Â12 per metric and pair of algorithms.

Â12 in the report is oriented so that values above 0.5 favour the first
algorithm of the pair (HV is higher-better, GD and SP lower-better).
"""

from itertools import combinations
from math import sqrt
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

import numpy as np
import pandas as pd
from tabulate import tabulate

from iotscheduler.analyzers.BaseAnalysis import BaseAnalysis
from iotscheduler.analyzers.QualityIndicators import DEFAULT_HV_REF, Front, gd, hypervolume, reference_front, spread
from iotscheduler.analyzers.StatisticalTests import ALPHA, effect_magnitude, mann_whitney_u, vargha_delaney_a12
from iotscheduler.core.DataStorage import IOHelper, Importer
from iotscheduler.core.Exceptions import ConfigurationError

METRICS = ("HV", "GD", "SP")
HIGHER_IS_BETTER = {"HV": True, "GD": False, "SP": False}

REPORT_FILE = "report.json"
RUNS_FILE = "report_runs.csv"
COMPARISONS_FILE = "report_comparisons.csv"


class FrontComparisonAnalyzer(BaseAnalysis, IOHelper):
    """
    :param archives: archive JSON files (or run directories holding archive.json)
    :param labels: optional label per archive; defaults to the recorded algorithm
    :param hv_ref: hypervolume reference point in minimized objective space
    """

    def __init__(self, archives: Sequence[Union[str, Path]], out_dir=None,
                 labels: Optional[Sequence[str]] = None, hv_ref=DEFAULT_HV_REF,
                 alpha: float = ALPHA, verbose: bool = False, debug: bool = False):
        super().__init__(archives, out_dir, verbose, debug)
        if labels is not None and len(labels) != len(self.inputs):
            raise ConfigurationError(f"{len(labels)} labels for {len(self.inputs)} archives")
        self.labels = list(labels) if labels is not None else None
        self.hv_ref = tuple(float(x) for x in hv_ref)
        self.alpha = alpha
        if self.out_dir is not None:
            self.base_path = self.out_dir

    def load(self) -> None:
        self.raw = [Importer.load_archive(p) for p in self.inputs]
        self.log.info(f"Loaded {len(self.raw)} archives")

    def prepare(self) -> None:
        labels = self.labels or [imp.algorithm for imp in self.raw]
        runs = []
        for label, imp in zip(labels, self.raw):
            runs.append({
                "algorithm": label,
                "source": imp.metadata["source"],
                "seed": imp.metadata.get("seed"),
                "front": Front.from_points(imp.front_points(), provenance=imp.metadata["source"]),
            })
        self.processed = runs

    def compute(self) -> None:
        runs = self.processed
        ref = reference_front([r["front"] for r in runs])
        worst_gd = sqrt(ref.dim)

        rows = []
        for r in runs:
            front: Front = r["front"]
            if len(front) == 0:
                self.notice(f"{r['source']}: no feasible schedule, scored GD={worst_gd:.4f}, SP=1, HV=0")
                values = {"GD": worst_gd, "SP": 1.0, "HV": 0.0}
            else:
                values = {
                    "GD": gd(front, ref),
                    "SP": spread(front, ref),
                    "HV": hypervolume(front, self.hv_ref),
                }
            rows.append({"algorithm": r["algorithm"], "source": r["source"], "seed": r["seed"],
                         "front_size": len(front), **values})
        runs_frame = pd.DataFrame(rows, columns=["algorithm", "source", "seed", "front_size", *METRICS])

        order = list(dict.fromkeys(runs_frame["algorithm"]))
        comparisons = []
        if len(order) < 2:
            self.notice("only one algorithm label; statistics skipped")
        for a, b in combinations(order, 2):
            xa = runs_frame.loc[runs_frame["algorithm"] == a]
            xb = runs_frame.loc[runs_frame["algorithm"] == b]
            if len(xa) < 2 or len(xb) < 2:
                self.notice(f"{a} vs {b}: fewer than two runs per algorithm; statistics skipped")
                continue
            for metric in METRICS:
                comparisons.append(self._compare(metric, a, xa[metric].to_numpy(), b, xb[metric].to_numpy()))
        comp_frame = pd.DataFrame(comparisons, columns=[
            "metric", "algorithm_a", "algorithm_b", "u", "p_value", "significant",
            "a12", "magnitude", "mean_a", "mean_b",
        ])

        self.results = {
            "reference_front": ref.points.tolist(),
            "runs": runs_frame,
            "comparisons": comp_frame,
        }

    def _compare(self, metric: str, a: str, va: np.ndarray, b: str, vb: np.ndarray) -> Dict:
        test = mann_whitney_u(va, vb, self.alpha)
        if HIGHER_IS_BETTER[metric]:
            a12 = vargha_delaney_a12(va, vb)
        else:
            a12 = vargha_delaney_a12(-va, -vb)
        return {
            "metric": metric,
            "algorithm_a": a,
            "algorithm_b": b,
            "u": test.u,
            "p_value": test.p_value,
            "significant": test.significant,
            "a12": a12,
            "magnitude": effect_magnitude(a12),
            "mean_a": float(np.mean(va)),
            "mean_b": float(np.mean(vb)),
        }

    def summarize(self) -> None:
        runs = self.results["runs"]
        per_algo = runs.groupby("algorithm", sort=False)[["front_size", *METRICS]].mean()
        tables = [tabulate(per_algo.reset_index().values.tolist(),
                           headers=["Algorithm", "Mean front", "Mean HV", "Mean GD", "Mean SP"],
                           tablefmt="github", floatfmt=".4f")]
        comps = self.results["comparisons"]
        if len(comps):
            tables.append(tabulate(
                comps[["metric", "algorithm_a", "algorithm_b", "p_value", "a12", "mean_a", "mean_b"]].values.tolist(),
                headers=["Metric", "A", "B", "p-value", "Â12", "Mean A", "Mean B"],
                tablefmt="github", floatfmt=".4g"))
        self.summary = "\n\n".join(tables)
        if self.verbose:
            print(self.summary)

    def report_document(self) -> Dict:
        return {
            "hv_reference_point": list(self.hv_ref),
            "alpha": self.alpha,
            "reference_front": self.results["reference_front"],
            "runs": self.results["runs"].to_dict(orient="records"),
            "comparisons": self.results["comparisons"].to_dict(orient="records"),
            "notices": list(self.notices),
        }

    def export(self) -> None:
        self.save_json(self.report_document(), REPORT_FILE)
        self.save_csv(self.results["runs"], RUNS_FILE)
        self.save_csv(self.results["comparisons"], COMPARISONS_FILE)
        self.log.info(f"Comparison report written to {self.out_dir}")
