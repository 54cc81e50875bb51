"""
NSGA3Optimizer.py

Reference-point based many-objective search over requirement-indexed genomes.

Per generation:
    penalize the population -> binary tournament -> one-point crossover
    -> conflict-aware mutation -> evaluate offspring -> update elitist archive
    -> merge parents and offspring (distinct genomes) -> penalize the union
    -> non-dominated sort -> reference-point niching down to n_p.
"""

from typing import List, Tuple

import numpy as np

from iotscheduler.analyzers.QualityIndicators import non_dominated_ranks
from iotscheduler.core.BaseOptimizer import BaseOptimizer, OptimizationResult
from iotscheduler.core.CampaignConfig import SearchConfig
from iotscheduler.objectives.FitnessFunctions import FitnessVector, apply_penalty
from iotscheduler.optimizers.Genome import (
    Genome,
    crossover_one_point,
    init_population,
    mutate,
    option_table,
)
from iotscheduler.optimizers.ParetoArchive import ArchiveEntry, ParetoArchive
from iotscheduler.optimizers.ReferencePoints import reference_directions

EPS = 1e-10


# -------------------------------------------------------------------------
# Environmental selection helpers
# -------------------------------------------------------------------------

def normalize_objectives(F: np.ndarray) -> np.ndarray:
    """
    Translate by the ideal point and scale by the hyperplane intercepts of
    the extreme points; falls back to the per-objective maxima when the
    hyperplane is degenerate.
    """
    ideal = F.min(axis=0)
    Ft = F - ideal
    m = F.shape[1]

    extremes = []
    for k in range(m):
        w = np.full(m, 1e-6)
        w[k] = 1.0
        extremes.append(int(np.argmin(np.max(Ft / w, axis=1))))
    A = Ft[extremes]

    intercepts = None
    try:
        plane = np.linalg.solve(A, np.ones(m))
        with np.errstate(divide="ignore"):
            candidate = 1.0 / plane
        if np.all(np.isfinite(candidate)) and np.all(candidate > 1e-6):
            intercepts = candidate
    except np.linalg.LinAlgError:
        pass
    if intercepts is None:
        intercepts = Ft.max(axis=0)
    intercepts = np.where(intercepts < EPS, 1.0, intercepts)
    return Ft / intercepts


def associate(Fn: np.ndarray, directions: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Nearest reference direction (perpendicular distance) of every point."""
    W = directions / np.linalg.norm(directions, axis=1, keepdims=True)
    proj = Fn @ W.T
    dist = np.linalg.norm(Fn[:, None, :] - proj[:, :, None] * W[None, :, :], axis=2)
    niche = dist.argmin(axis=1)
    return niche, dist[np.arange(len(Fn)), niche]


def niching_select(F: np.ndarray, n_select: int, directions: np.ndarray,
                   rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Choose n_select rows of F: whole fronts first, then the last front by
    niche count.

    :return: (chosen row indices, niche of each chosen row, niche counts)
    """
    n = len(F)
    ranks = non_dominated_ranks(F)
    order = np.argsort(ranks, kind="stable")
    cum = np.cumsum(np.bincount(ranks))
    last_rank = int(np.searchsorted(cum, min(n_select, n)))

    in_scope = np.flatnonzero(ranks <= last_rank)
    Fn = normalize_objectives(F[in_scope])
    niche_scope, dist_scope = associate(Fn, directions)
    niche = np.full(n, -1, dtype=np.int64)
    dist = np.full(n, np.inf)
    niche[in_scope] = niche_scope
    dist[in_scope] = dist_scope

    chosen = [int(i) for i in order if ranks[i] < last_rank]
    counts = np.bincount(niche[chosen], minlength=len(directions)).astype(np.int64)
    pool = [int(i) for i in order if ranks[i] == last_rank]
    open_niches = np.ones(len(directions), dtype=bool)

    while len(chosen) < n_select and pool:
        pool_niches = np.array([niche[i] for i in pool])
        available = open_niches & np.isin(np.arange(len(directions)), pool_niches)
        candidates = np.flatnonzero(available)
        low = counts[candidates].min()
        j = int(rng.choice(candidates[counts[candidates] == low]))
        members = [i for i in pool if niche[i] == j]
        if counts[j] == 0:
            pick = min(members, key=lambda i: (dist[i], i))
        else:
            pick = int(rng.choice(members))
        chosen.append(pick)
        pool.remove(pick)
        counts[j] += 1
        if not any(niche[i] == j for i in pool):
            open_niches[j] = False

    chosen_arr = np.array(chosen, dtype=np.int64)
    return chosen_arr, niche[chosen_arr], counts


class NSGA3Optimizer(BaseOptimizer):
    """
    Reference-point NSGA-III with the penalty constraint handling and the
    conflict-aware mutation.
    """

    ConfigModel = SearchConfig
    algorithm = "nsga3"

    def _setup(self):
        cfg = self.configs
        self.cands = self.scenario.candidates
        self.graph = self.scenario.graph
        self.table = option_table(self.cands)
        self.rows = np.arange(self.cands.n_requirements)
        self.directions = reference_directions(cfg.n_reference_points, 3, cfg.reference_point_method)
        self.archive = ParetoArchive()

    def indices(self, g: Genome) -> np.ndarray:
        return self.table[self.rows, g.as_array()]

    # --- selection ---

    def tournament(self, F: np.ndarray, niche: np.ndarray, counts: np.ndarray) -> int:
        """Binary tournament: dominance, then the less crowded niche, then a coin flip."""
        a, b = (int(x) for x in self.rng.integers(0, len(F), size=2))
        fa, fb = F[a], F[b]
        if np.all(fa <= fb) and np.any(fa < fb):
            return a
        if np.all(fb <= fa) and np.any(fb < fa):
            return b
        if niche[a] != niche[b] and counts[niche[a]] != counts[niche[b]]:
            return a if counts[niche[a]] < counts[niche[b]] else b
        return a if self.rng.random() < 0.5 else b

    def breed(self, population: List[Genome], F: np.ndarray, niche: np.ndarray,
              counts: np.ndarray) -> List[Genome]:
        cfg = self.configs
        children: List[Genome] = []
        while len(children) < cfg.population_size:
            p1 = population[self.tournament(F, niche, counts)]
            p2 = population[self.tournament(F, niche, counts)]
            if self.rng.random() < cfg.crossover_prob:
                c1, c2 = crossover_one_point(p1, p2, self.rng)
            else:
                c1, c2 = p1, p2
            children.append(mutate(c1, self.cands, self.graph, cfg, self.rng))
            children.append(mutate(c2, self.cands, self.graph, cfg, self.rng))
        return children[: cfg.population_size]

    def environmental_selection(self, genomes: List[Genome], raw: List[FitnessVector]):
        penalized = apply_penalty(raw)
        F = np.array([v.minimized for v in penalized], dtype=float)
        n_keep = min(self.configs.population_size, len(genomes))
        chosen, niche, counts = niching_select(F, n_keep, self.directions, self.rng)
        # keep population in a canonical order
        order = np.argsort(chosen, kind="stable")
        chosen, niche = chosen[order], niche[order]
        return ([genomes[i] for i in chosen], [raw[i] for i in chosen], niche, counts)

    # --- main loop ---

    def _run(self) -> OptimizationResult:
        self._setup()
        population = init_population(self.configs, self.cands, self.rng)
        raw = self.evaluate_batch([self.indices(g) for g in population])
        population = population[: len(raw)]
        self.archive.update(ArchiveEntry(g, v) for g, v in zip(population, raw))
        population, raw, niche, counts = self.environmental_selection(population, raw)
        self._log_iteration(raw)

        while not self.out_of_budget():
            self.iteration += 1
            F = np.array([v.minimized for v in apply_penalty(raw)], dtype=float)
            offspring = self.breed(population, F, niche, counts)
            off_raw = self.evaluate_batch([self.indices(g) for g in offspring])
            offspring = offspring[: len(off_raw)]
            self.archive.update(ArchiveEntry(g, v) for g, v in zip(offspring, off_raw))

            merged_g, merged_raw, seen = [], [], set()
            for g, v in zip(population + offspring, raw + off_raw):
                if g not in seen:
                    seen.add(g)
                    merged_g.append(g)
                    merged_raw.append(v)
            population, raw, niche, counts = self.environmental_selection(merged_g, merged_raw)
            self._log_iteration(off_raw)

        return self._result(self.archive)

    def _log_iteration(self, batch: List[FitnessVector]) -> None:
        viol = [v.violations for v in batch]
        self.record_telemetry(
            min_violations=self.archive.min_violations if len(self.archive) else min(viol, default=0),
            mean_violations=float(np.mean(viol)) if viol else 0.0,
            front_size=len(self.archive) if self.archive.has_feasible else 0,
            hv=self.archive.hypervolume(),
        )
