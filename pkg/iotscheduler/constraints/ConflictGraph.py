"""
ConflictGraph.py

Pairwise incompatibility between candidate procedures and the conflict graph
built from it. A procedure schedule is feasible iff it is an independent set
of the graph.

Two procedures conflict when
  1. they satisfy the same (satellite, type) requirement,
  2. their [start, end) intervals overlap on the single antenna, or
  3. the gap from the earlier end to the later start is shorter than the
     later procedure's config_time.
"""

import json
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple, Union

import numpy as np
from tabulate import tabulate

from iotscheduler.campaign.CandidateGenerator import CandidateSet
from iotscheduler.controllers.logging_utils import get_logger
from iotscheduler.core.Exceptions import UnknownProcedureError
from iotscheduler.core.ScheduleModel import ProcedureSchedule, TestProcedure

log = get_logger("ConflictGraph")


def conflicts_pair(a: TestProcedure, b: TestProcedure, single_antenna: bool = True) -> bool:
    """True when a and b cannot share a schedule; symmetric, and False for a procedure against itself."""
    if a.id == b.id:
        return False
    if a.requirement_key == b.requirement_key:
        return True
    if not single_antenna:
        return False
    a0, a1, b0, b1 = int(a.t_start), int(a.t_end), int(b.t_start), int(b.t_end)
    if a0 < b1 and b0 < a1:
        return True
    if a1 <= b0:
        return b0 - a1 < int(b.config_time)
    return a0 - b1 < int(a.config_time)


class ConflictGraph:
    """
    Immutable conflict graph over candidate indices.

    :param ids: vertex labels (procedure ids), index-aligned with the candidates
    :param edges: unordered pairs (i, j), i < j
    """

    def __init__(self, ids: Sequence[str], edges: Iterable[Tuple[int, int]]):
        self.ids: Tuple[str, ...] = tuple(ids)
        self._index: Dict[str, int] = {pid: i for i, pid in enumerate(self.ids)}
        n = len(self.ids)

        matrix = np.zeros((n, n), dtype=bool)
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop on vertex {i}")
            matrix[i, j] = matrix[j, i] = True
        matrix.setflags(write=False)
        self.matrix = matrix

        rows, cols = np.nonzero(np.triu(matrix, 1))
        self.edges: FrozenSet[Tuple[int, int]] = frozenset(zip(rows.tolist(), cols.tolist()))
        self.adjacency: Tuple[FrozenSet[int], ...] = tuple(
            frozenset(np.flatnonzero(matrix[i]).tolist()) for i in range(n)
        )

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.matrix[i, j])

    def index_of(self, procedure_id: str) -> int:
        try:
            return self._index[procedure_id]
        except KeyError:
            raise UnknownProcedureError(
                f"procedure {procedure_id!r} is not a vertex of the conflict graph"
            ) from None

    def indices_of(self, s: Union[ProcedureSchedule, Iterable[TestProcedure]]) -> np.ndarray:
        return np.array([self.index_of(p.id) for p in s], dtype=np.int64)

    # --- index-level queries used on the search hot path ---

    def violations_of_indices(self, idx: np.ndarray) -> int:
        """Unordered conflicting pairs among the given vertices."""
        if len(idx) < 2:
            return 0
        sub = self.matrix[np.ix_(idx, idx)]
        return int(np.count_nonzero(np.triu(sub, 1)))

    def conflicts_against(self, candidates: np.ndarray, members: np.ndarray) -> np.ndarray:
        """For each candidate, how many of `members` it conflicts with."""
        if len(members) == 0:
            return np.zeros(len(candidates), dtype=np.int64)
        return self.matrix[np.ix_(candidates, members)].sum(axis=1)

    # --- exports ---

    def to_edge_list(self) -> Dict[str, List]:
        return {
            "vertices": list(self.ids),
            "edges": [list(e) for e in sorted(self.edges)],
        }

    def save_edge_list(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_edge_list(), indent=2) + "\n", encoding="utf-8")
        return path

    def stats(self) -> Dict[str, float]:
        n = len(self)
        deg = self.degrees
        return {
            "vertices": n,
            "edges": self.n_edges,
            "density": (2.0 * self.n_edges / (n * (n - 1))) if n > 1 else 0.0,
            "mean_degree": float(deg.mean()) if n else 0.0,
            "max_degree": int(deg.max()) if n else 0,
            "isolated": int(np.count_nonzero(deg == 0)) if n else 0,
        }

    def stats_table(self) -> str:
        rows = [[k, f"{v:.4f}" if isinstance(v, float) else v] for k, v in self.stats().items()]
        return tabulate(rows, headers=["Conflict graph", "Value"], tablefmt="github")


def _sweep_edges(starts: np.ndarray, ends: np.ndarray, config: np.ndarray,
                 groups: np.ndarray) -> List[Tuple[int, int]]:
    """
    Interval-sorted sweep. Only pairs whose later start falls before the
    earlier end plus the largest config_time can conflict on the antenna;
    same-requirement pairs are added regardless of time.
    """
    n = len(starts)
    edges = set()
    order = np.argsort(starts, kind="stable")
    s_sorted = starts[order]
    reach = int(config.max()) if n else 0

    for pos in range(n):
        i = order[pos]
        hi = np.searchsorted(s_sorted, ends[i] + reach, side="left")
        if hi <= pos + 1:
            continue
        js = order[pos + 1:hi]
        # js start at or after i; overlap, or a gap shorter than j's config time
        hit = (s_sorted[pos + 1:hi] < ends[i]) | (s_sorted[pos + 1:hi] - ends[i] < config[js])
        for j in js[hit]:
            edges.add((min(i, j), max(i, j)))

    for g in np.unique(groups):
        members = np.flatnonzero(groups == g)
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                edges.add((int(members[a]), int(members[b])))
    return [(int(i), int(j)) for i, j in edges]


def build_graph(cands: Union[CandidateSet, Sequence[TestProcedure]]) -> ConflictGraph:
    """Edge (i, j) iff conflicts_pair(cands[i], cands[j])."""
    if isinstance(cands, CandidateSet):
        procs = cands.candidates
        starts, ends, config = cands.starts, cands.ends, cands.config_times
        groups = cands.requirement_of
    else:
        procs = tuple(cands)
        starts = np.array([int(p.t_start) for p in procs], dtype=np.int64)
        ends = np.array([int(p.t_end) for p in procs], dtype=np.int64)
        config = np.array([int(p.config_time) for p in procs], dtype=np.int64)
        keys: Dict[Tuple, int] = {}
        groups = np.array([keys.setdefault(p.requirement_key, len(keys)) for p in procs],
                          dtype=np.int64)

    ids = [p.id for p in procs]
    if len(set(ids)) != len(ids):
        raise ValueError("candidate ids must be unique to build a conflict graph")

    graph = ConflictGraph(ids, _sweep_edges(starts, ends, config, groups))
    log.info(f"Conflict graph: {len(graph)} vertices, {graph.n_edges} edges")
    return graph


def violation_count(s: ProcedureSchedule, g: ConflictGraph) -> int:
    """Unordered conflicting pairs within s."""
    return g.violations_of_indices(g.indices_of(s))


def feasible(s: ProcedureSchedule, g: ConflictGraph) -> bool:
    return violation_count(s, g) == 0
