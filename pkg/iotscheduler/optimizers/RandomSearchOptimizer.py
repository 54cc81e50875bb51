"""
RandomSearchOptimizer.py

Baseline: uniform genomes, evaluated in population-sized batches through the
same pipeline as the evolutionary search, kept in the same elitist archive.
"""

import numpy as np

from iotscheduler.core.BaseOptimizer import BaseOptimizer, OptimizationResult
from iotscheduler.core.CampaignConfig import SearchConfig
from iotscheduler.core.Exceptions import InfeasibleScenarioError
from iotscheduler.optimizers.Genome import Genome, option_table, random_genes
from iotscheduler.optimizers.ParetoArchive import ArchiveEntry, ParetoArchive


class RandomSearchOptimizer(BaseOptimizer):

    ConfigModel = SearchConfig
    algorithm = "rs"

    def _run(self) -> OptimizationResult:
        cands = self.scenario.candidates
        counts = cands.option_counts
        empty = [req for req, c in zip(cands.requirements, counts) if c == 0]
        if empty:
            raise InfeasibleScenarioError(empty)

        table = option_table(cands)
        rows = np.arange(cands.n_requirements)
        archive = ParetoArchive()

        while not self.out_of_budget():
            size = min(self.configs.population_size, self.remaining_evals)
            genes = random_genes(counts, size, self.rng)
            batch = self.evaluate_batch(table[rows, genes])
            archive.update(ArchiveEntry(Genome.of(g), v) for g, v in zip(genes, batch))

            viol = [v.violations for v in batch]
            self.record_telemetry(
                min_violations=archive.min_violations,
                mean_violations=float(np.mean(viol)),
                front_size=len(archive) if archive.has_feasible else 0,
                hv=archive.hypervolume(),
            )
            self.iteration += 1

        return self._result(archive)
