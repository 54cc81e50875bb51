"""
Genome.py

Requirement-indexed encoding: gene k is a position in the option list of
requirement k. Every genome therefore decodes to exactly one procedure per
requirement; only conflicts can make it infeasible.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from iotscheduler.campaign.CandidateGenerator import CandidateSet
from iotscheduler.constraints.ConflictGraph import ConflictGraph
from iotscheduler.core.CampaignConfig import SearchConfig
from iotscheduler.core.Exceptions import GenomeError, InfeasibleScenarioError
from iotscheduler.core.ScheduleModel import ProcedureSchedule


@dataclass(frozen=True)
class Genome:
    genes: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.genes)

    def as_array(self) -> np.ndarray:
        return np.array(self.genes, dtype=np.int64)

    @classmethod
    def of(cls, genes: Sequence[int]) -> "Genome":
        return cls(tuple(int(x) for x in genes))


def option_table(cands: CandidateSet) -> np.ndarray:
    """(requirements × max options) candidate indices, padded with -1."""
    width = max((len(o) for o in cands.options), default=0)
    table = np.full((cands.n_requirements, width), -1, dtype=np.int64)
    for k, o in enumerate(cands.options):
        table[k, :len(o)] = o
    return table


def _check(g: Genome, cands: CandidateSet) -> None:
    if len(g) != cands.n_requirements:
        raise GenomeError(f"genome has {len(g)} genes, campaign has {cands.n_requirements} requirements")
    for k, (gene, o) in enumerate(zip(g.genes, cands.options)):
        if not 0 <= gene < len(o):
            raise GenomeError(f"gene {k} = {gene} out of range [0, {len(o)}) for {cands.requirements[k]}")


def candidate_indices(g: Genome, cands: CandidateSet) -> np.ndarray:
    _check(g, cands)
    return np.array([o[gene] for gene, o in zip(g.genes, cands.options)], dtype=np.int64)


def decode(g: Genome, cands: CandidateSet) -> ProcedureSchedule:
    """One procedure per requirement, in requirement order."""
    return ProcedureSchedule(procedures=tuple(cands.candidates[i] for i in candidate_indices(g, cands)))


def encode(s: ProcedureSchedule, cands: CandidateSet) -> Genome:
    """Inverse of decode for schedules drawn from the candidate set."""
    by_key = {p.requirement_key: p for p in s.procedures}
    genes = []
    for req, o in zip(cands.requirements, cands.options):
        p = by_key.pop(req.key, None)
        if p is None or not cands.has(p.id):
            raise GenomeError(f"schedule has no candidate procedure for {req}")
        i = cands.index_of(p.id)
        if i not in o:
            raise GenomeError(f"procedure {p.id} does not satisfy {req}")
        genes.append(o.index(i))
    if by_key:
        raise GenomeError(f"schedule covers unknown requirement(s) {sorted(map(str, by_key))}")
    return Genome.of(genes)


def random_genes(counts: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    """(size × requirements) uniform gene matrix."""
    return rng.integers(0, counts, size=(size, len(counts)))


def init_population(cfg: SearchConfig, cands: CandidateSet,
                    rng: Optional[np.random.Generator] = None) -> List[Genome]:
    """n_p genomes with genes drawn uniformly per requirement."""
    counts = cands.option_counts
    empty = [req for req, c in zip(cands.requirements, counts) if c == 0]
    if empty:
        raise InfeasibleScenarioError(empty)
    rng = rng if rng is not None else np.random.default_rng(cfg.rng_seed)
    return [Genome.of(row) for row in random_genes(counts, cfg.population_size, rng)]


def crossover_one_point(a: Genome, b: Genome, rng: np.random.Generator,
                        point: Optional[int] = None) -> Tuple[Genome, Genome]:
    """Swap the suffixes after a point i in [1, len-1]."""
    if len(a) != len(b):
        raise GenomeError("crossover parents differ in length")
    if len(a) < 2:
        return a, b
    i = int(rng.integers(1, len(a))) if point is None else point
    return Genome(a.genes[:i] + b.genes[i:]), Genome(b.genes[:i] + a.genes[i:])


def nonconflict_probability(violations: int, size: int, cfg: SearchConfig) -> float:
    """p_nc_min + r·(p_nc_max - p_nc_min) with r = 1 - violations/size clamped to [0, 1]."""
    r = 1.0 - violations / size if size else 1.0
    r = min(1.0, max(0.0, r))
    return cfg.p_nc_min + r * (cfg.p_nc_max - cfg.p_nc_min)


def mutation_weights(g: Genome, position: int, cands: CandidateSet, graph: ConflictGraph,
                     cfg: SearchConfig) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eligible replacement options for one gene and their normalized
    probabilities: P_c for options conflicting with the rest of the schedule,
    P_nc otherwise.

    :return: (option positions, weights); both empty if nothing is eligible
    """
    options = cands.options[position]
    eligible = np.array([j for j in range(len(options)) if j != g.genes[position]], dtype=np.int64)
    if len(eligible) == 0:
        return eligible, np.zeros(0)

    idx = candidate_indices(g, cands)
    p_nc = nonconflict_probability(graph.violations_of_indices(idx), len(idx), cfg)
    rest = np.delete(idx, position)
    clash = graph.conflicts_against(np.asarray(options, dtype=np.int64)[eligible], rest) > 0
    weights = np.where(clash, 1.0 - p_nc, p_nc)
    total = weights.sum()
    if total <= 0:
        weights = np.full(len(eligible), 1.0 / len(eligible))
    else:
        weights = weights / total
    return eligible, weights


def mutate(g: Genome, cands: CandidateSet, graph: ConflictGraph, cfg: SearchConfig,
           rng: np.random.Generator) -> Genome:
    """Conflict-aware uniform mutation of one gene, applied with probability μ_m."""
    if rng.random() >= cfg.mutation_prob:
        return g
    position = int(rng.integers(len(g)))
    eligible, weights = mutation_weights(g, position, cands, graph, cfg)
    if len(eligible) == 0:
        return g
    choice = int(eligible[rng.choice(len(eligible), p=weights)])
    genes = list(g.genes)
    genes[position] = choice
    return Genome(tuple(genes))
