# iotscheduler/controllers/CampaignController.py

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Type

import pandas as pd
from tabulate import tabulate

from iotscheduler.analyzers.FrontComparisonAnalyzer import FrontComparisonAnalyzer
from iotscheduler.analyzers.QualityIndicators import DEFAULT_HV_REF
from iotscheduler.campaign.CandidateGenerator import candidate_frame_rows
from iotscheduler.campaign.PassIngest import load_passes, passes_per_satellite, write_passes
from iotscheduler.campaign.PassSynthesizer import riot_eligible_count
from iotscheduler.campaign.ScenarioFactory import Scenario, build_synthetic_campaign
from iotscheduler.controllers.logging_utils import get_logger
from iotscheduler.core.BaseOptimizer import BaseOptimizer, OptimizationResult
from iotscheduler.core.CampaignConfig import CampaignSpec, RunManifest, SynthParams
from iotscheduler.core.DataStorage import Exporter, Importer
from iotscheduler.core.Exceptions import ConfigurationError
from iotscheduler.optimizers.AntColonyOptimizer import AntColonyOptimizer
from iotscheduler.optimizers.NSGA3Optimizer import NSGA3Optimizer
from iotscheduler.optimizers.RandomSearchOptimizer import RandomSearchOptimizer


OPTIMIZERS: Dict[str, Type[BaseOptimizer]] = {
    "nsga3": NSGA3Optimizer,
    "rs": RandomSearchOptimizer,
    "aco": AntColonyOptimizer,
}

SCENARIO_FILE = "scenario.json"


class CampaignController:
    """Ties pass files, scenarios, optimizers and exports together for the CLI and scripts."""

    def __init__(self, debug: bool = False, suppress_logs: bool = False):
        self.debug = debug
        self.log = get_logger("CampaignController", debug, suppress_all_logs=suppress_logs)

    # --- scenario ---

    def load_scenario(self, scenario_path, passes_path) -> Scenario:
        """Campaign JSON + pass file → Scenario (candidates, conflict graph, cost bounds)."""
        spec = CampaignSpec.from_json_file(scenario_path)
        catalog = load_passes(passes_path, site_id=spec.site_id)
        self.log.info(f"Campaign {spec.site_id}: {len(spec.requirements)} requirements over "
                      f"{spec.window[0].to_iso()} → {spec.window[1].to_iso()}")
        return Scenario.build(catalog, spec)

    def synth(self, out_dir, seed: int, n_sats: int, days: float, riot_sats: Optional[int] = None,
              params: Optional[SynthParams] = None, fmt: str = "csv",
              **spec_fields) -> Tuple[Path, Path, str]:
        """
        Write a seeded synthetic pass file plus its matching campaign JSON.

        :return: (pass file, scenario file, passes-per-satellite table)
        """
        params = params or SynthParams()
        if riot_sats is None:
            riot_sats = riot_eligible_count(n_sats, params.riot_fraction)
        catalog, spec = build_synthetic_campaign(seed, n_sats, days, riot_sats, params=params,
                                                 **spec_fields)
        out = Exporter(out_dir)
        passes_path = write_passes(catalog, out.base_path / f"passes.{fmt}", fmt)
        scenario_path = out.save_json(spec.model_dump(mode="json"), SCENARIO_FILE)

        table = tabulate(passes_per_satellite(catalog, spec.riot_max_edge_elevation_deg),
                         headers=["Satellite", "Passes", f"Edges <= {spec.riot_max_edge_elevation_deg:g}°"],
                         tablefmt="github")
        self.log.info(f"Synthesized {len(catalog)} passes for {n_sats} satellites (seed={seed})")
        return passes_path, scenario_path, table

    def candidates(self, scenario: Scenario, out_dir=None) -> str:
        """Candidate and conflict-graph summaries; dumps CSV + edge list when out_dir is set."""
        if out_dir is not None:
            out = Exporter(out_dir)
            out.save_csv(pd.DataFrame(candidate_frame_rows(scenario.candidates)), "candidates.csv")
            scenario.graph.save_edge_list(out.base_path / "conflict_graph.json")
            out.save_json(scenario.graph.stats(), "conflict_stats.json")
        return scenario.candidates.summary_table() + "\n\n" + scenario.graph.stats_table()

    # --- optimization ---

    def build_optimizer(self, algorithm: str, raw_cfg: Dict[str, Any], scenario: Scenario) -> BaseOptimizer:
        try:
            cls = OPTIMIZERS[algorithm]
        except KeyError:
            raise ConfigurationError(f"unknown algorithm {algorithm!r}; expected one of {sorted(OPTIMIZERS)}") from None
        return cls.start_optimizer(raw_cfg, scenario, debug=self.debug)

    def optimize(self, manifest: RunManifest, scenario: Optional[Scenario] = None,
                 export: bool = True) -> OptimizationResult:
        """Run the manifest's algorithm and, unless export=False, write its outputs."""
        scenario = scenario or self.load_scenario(manifest.scenario_path, manifest.passes_path)
        with self.build_optimizer(manifest.algorithm, manifest.optimizer_config(), scenario) as opt:
            result = opt.run()
        if export:
            Exporter(manifest.output_dir).export_run(result, scenario,
                                                     manifest=manifest.model_dump(mode="json"),
                                                     seed=manifest.seed)
        self.log.info(self.result_table(result))
        return result

    @staticmethod
    def result_table(result: OptimizationResult, limit: int = 10) -> str:
        rows = []
        for k, e in enumerate(result.archive.entries[:limit]):
            f = e.fitness
            rows.append([k, f.violations,
                         *(f"{x:.4f}" if x is not None else "-" for x in (f.use, f.frag, f.cost)),
                         f.n_slots if f.n_slots is not None else "-"])
        return "\n" + tabulate(rows, headers=["#", "Violations", "Use", "Frag", "Cost", "Slots"],
                               tablefmt="github")

    # --- post-processing ---

    def evaluate(self, archives: Sequence, out_dir=None, labels: Optional[Sequence[str]] = None,
                 hv_ref=DEFAULT_HV_REF,
                 verbose: bool = False) -> Dict[str, Any]:
        analysis = FrontComparisonAnalyzer(archives, out_dir, labels=labels, hv_ref=hv_ref, verbose=verbose,
                                           debug=self.debug)
        out = analysis.run_all()
        out["report"] = analysis.report_document()
        return out

    def export(self, archive_path, out_dir, prefix: str = "slots") -> List[Path]:
        """Archive JSON → Gantt CSV + slot JSON per entry."""
        archive = Importer.load_archive(archive_path)
        written = Exporter(out_dir).export_slots(archive.entries, prefix)
        self.log.info(f"Exported {len(archive.entries)} schedules from {archive.metadata['source']}")
        return written
