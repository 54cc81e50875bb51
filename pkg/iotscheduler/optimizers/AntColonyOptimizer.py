"""
AntColonyOptimizer.py

Max-min ant system baseline. Vertices are the candidate procedures; an ant
starts at a random candidate and keeps moving to a conflict-free candidate of
a still uncovered requirement, chosen by the random proportional rule

    p_ij = τ_ij^α · η_j^β / Σ_l τ_il^α · η_l^β

with η_j the normalized gain of the scalar fitness when j joins the partial
schedule. After each iteration trails evaporate, the best-so-far path gets
deposit · F(best) and every trail is clamped to [τ_min, τ_max].
"""

from typing import List, Optional, Tuple

import numpy as np

from iotscheduler.core.BaseOptimizer import BaseOptimizer, OptimizationResult
from iotscheduler.core.CampaignConfig import AcoConfig
from iotscheduler.core.Exceptions import InfeasibleScenarioError
from iotscheduler.objectives.FitnessFunctions import FitnessVector, evaluate_indices, scalar_fitness
from iotscheduler.optimizers.Genome import Genome
from iotscheduler.optimizers.ParetoArchive import ArchiveEntry, ParetoArchive


class AntColonyOptimizer(BaseOptimizer):

    ConfigModel = AcoConfig
    algorithm = "aco"

    def _setup(self):
        cands = self.scenario.candidates
        counts = cands.option_counts
        empty = [req for req, c in zip(cands.requirements, counts) if c == 0]
        if empty:
            raise InfeasibleScenarioError(empty)

        self.cands = cands
        self.graph = self.scenario.graph
        self.n = len(cands)
        self.tau_min, self.tau_max = self.configs.trail_bounds(self.n)
        # trails start at tau_max
        self.tau = np.full((self.n, self.n), self.tau_max)

        self.position = np.zeros(self.n, dtype=np.int64)
        for o in cands.options:
            for j, i in enumerate(o):
                self.position[i] = j

        self.best_path: Optional[List[int]] = None
        self.best_entry: Optional[ArchiveEntry] = None
        self.best_score = -np.inf
        # partial-schedule evaluations behind η; not charged to eval_budget
        self.heuristic_evals = 0
        self.log.debug(f"Trail bounds [{self.tau_min:.4g}, {self.tau_max:.4g}] over {self.n} candidates")

    # --- construction ---

    def partial_fitness(self, members: List[int]) -> float:
        self.heuristic_evals += 1
        v = evaluate_indices(np.asarray(members, dtype=np.int64), self.cands, self.graph,
                             self.scenario.policy, self.scenario.cost_model, self.scenario.delta_c)
        return scalar_fitness(v)

    def heuristic(self, members: List[int], options: np.ndarray) -> np.ndarray:
        """η over conflict-free continuations, floored so the rule stays defined."""
        base = self.partial_fitness(members)
        gain = np.array([self.partial_fitness(members + [int(j)]) - base for j in options])
        best_gain = gain.max()
        if best_gain <= 0:
            return np.full(len(options), self.configs.heuristic_floor)
        return np.maximum(gain / best_gain, self.configs.heuristic_floor)

    def complete(self, members: List[int], covered: np.ndarray) -> List[int]:
        """Dead end: fill each uncovered requirement with its least-conflicting candidate."""
        for k in np.flatnonzero(~covered):
            options = np.asarray(self.cands.options[k], dtype=np.int64)
            clashes = self.graph.conflicts_against(options, np.asarray(members, dtype=np.int64))
            members.append(int(options[int(np.argmin(clashes))]))
            covered[k] = True
        return members

    def construct(self) -> Tuple[List[int], bool]:
        """One ant's path; the flag tells whether it hit a dead end."""
        cfg = self.configs
        owner = self.cands.requirement_of
        start = int(self.rng.integers(self.n))
        path = [start]
        covered = np.zeros(self.cands.n_requirements, dtype=bool)
        covered[owner[start]] = True
        blocked = self.graph.matrix[start].copy()

        while not covered.all():
            options = np.flatnonzero(~covered[owner] & ~blocked)
            if len(options) == 0:
                return self.complete(path, covered), True
            eta = self.heuristic(path, options)
            weights = self.tau[path[-1], options] ** cfg.alpha * eta ** cfg.beta
            j = int(options[self.rng.choice(len(options), p=weights / weights.sum())])
            path.append(j)
            covered[owner[j]] = True
            blocked |= self.graph.matrix[j]
        return path, False

    def to_genome(self, path: List[int]) -> Tuple[Genome, np.ndarray]:
        genes = np.zeros(self.cands.n_requirements, dtype=np.int64)
        genes[self.cands.requirement_of[path]] = self.position[path]
        idx = np.array([self.cands.options[k][g] for k, g in enumerate(genes)], dtype=np.int64)
        return Genome.of(genes), idx

    # --- trail update ---

    def update_trails(self) -> None:
        self.tau *= (1.0 - self.configs.rho)
        if self.best_path is not None:
            amount = self.configs.deposit * max(self.best_score, 0.0)
            for a, b in zip(self.best_path[:-1], self.best_path[1:]):
                self.tau[a, b] += amount
        np.clip(self.tau, self.tau_min, self.tau_max, out=self.tau)

    # --- main loop ---

    def _run(self) -> OptimizationResult:
        self._setup()
        feasible_ants = 0
        dead_ends = 0

        while not self.out_of_budget():
            self.iteration += 1
            batch: List[FitnessVector] = []
            for _ in range(self.configs.ants):
                if self.out_of_budget():
                    break
                path, dead_end = self.construct()
                dead_ends += dead_end
                genome, idx = self.to_genome(path)
                result = self.evaluate_batch([idx])
                if not result:
                    break
                v = result[0]
                batch.append(v)
                feasible_ants += v.feasible
                score = scalar_fitness(v)
                if score > self.best_score:
                    self.best_score = score
                    self.best_path = path
                    self.best_entry = ArchiveEntry(genome, v)

            self.update_trails()
            archive = ParetoArchive([self.best_entry] if self.best_entry else [])
            viol = [v.violations for v in batch]
            self.record_telemetry(
                min_violations=self.best_entry.fitness.violations if self.best_entry else min(viol, default=0),
                mean_violations=float(np.mean(viol)) if viol else 0.0,
                front_size=int(archive.has_feasible),
                hv=archive.hypervolume(),
                best_fitness=round(float(self.best_score), 9),
                heuristic_evals=self.heuristic_evals,
            )

        archive = ParetoArchive([self.best_entry] if self.best_entry else [])
        return self._result(archive, best=self.best_entry,
                            feasible_ants=int(feasible_ants), dead_ends=int(dead_ends),
                            heuristic_evals=self.heuristic_evals)
