"""NSGA-II selection for the (energy, CNOT count) objective pair, both minimized."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

__all__ = [
    "Fitness",
    "Individual",
    "ParetoArchive",
    "crowding_distance",
    "dominates",
    "environmental_select",
    "non_dominated_sort",
    "rank_population",
]


class Fitness(NamedTuple):
    energy: float
    n_cnot: int


@dataclass
class Individual:
    circuit: object
    fitness: Fitness
    best_angles: np.ndarray
    id: int
    parent_id: int | None = None
    rank: int | None = None
    crowding: float = 0.0
    info: dict = field(default_factory=dict, repr=False)


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """True if ``a`` is no worse than ``b`` everywhere and strictly better somewhere."""
    better = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            better = True
    return better


def non_dominated_sort(points: Sequence[Sequence[float]]) -> list[list[int]]:
    """Partition ``points`` into Pareto fronts (lists of indices, ascending)."""
    F = np.asarray(points, dtype=np.float64)
    n = len(F)
    if n == 0:
        return []
    F = F.reshape(n, -1)
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    dom = le & lt  # dom[i, j]: i dominates j
    count = dom.sum(axis=0)
    fronts = []
    current = np.flatnonzero(count == 0)
    while current.size:
        fronts.append(current.tolist())
        count = count - dom[current].sum(axis=0)
        count[current] = -1
        current = np.flatnonzero(count == 0)
    return fronts


def crowding_distance(front: Sequence[Sequence[float]]) -> list[float]:
    """Crowding distance of each member of one front.

    Per objective, the sorted extremes get infinity and interior points add
    ``(next - prev) / (max - min)``; an objective with zero range adds nothing.
    """
    F = np.asarray(front, dtype=np.float64)
    m = len(F)
    if m == 0:
        raise ValueError("empty front")
    F = F.reshape(m, -1)
    dist = np.zeros(m)
    for k in range(F.shape[1]):
        order = np.argsort(F[:, k], kind="stable")
        vals = F[order, k]
        dist[order[0]] = dist[order[-1]] = math.inf
        span = vals[-1] - vals[0]
        if m > 2 and span > 0:
            dist[order[1:-1]] += (vals[2:] - vals[:-2]) / span
    return dist.tolist()


def rank_population(pop: Sequence[Individual]) -> list[list[int]]:
    """Assign ``rank`` and ``crowding`` in place; returns the fronts."""
    fronts = non_dominated_sort([ind.fitness for ind in pop])
    for r, front in enumerate(fronts):
        dist = crowding_distance([pop[i].fitness for i in front])
        for i, d in zip(front, dist):
            pop[i].rank = r
            pop[i].crowding = d
    return fronts


def environmental_select(parents: Sequence[Individual], offspring: Sequence[Individual],
                         n: int) -> list[Individual]:
    """Keep the best ``n`` of ``parents + offspring`` by (rank, -crowding, id).

    Individuals sharing an id (unmutated clones) enter the pool once.
    """
    pool, seen = [], set()
    for ind in list(parents) + list(offspring):
        if ind.id not in seen:
            seen.add(ind.id)
            pool.append(ind)
    if len(pool) < n:
        raise ValueError(f"only {len(pool)} distinct candidates for {n} slots")
    rank_population(pool)
    pool.sort(key=lambda ind: (ind.rank, -ind.crowding, ind.id))
    return pool[:n]


@dataclass
class ParetoArchive:
    """First front of one generation as ``(Fitness, individual id)`` pairs."""

    generation: int
    entries: list[tuple[Fitness, int]]

    @classmethod
    def from_population(cls, generation: int, pop: Sequence[Individual]) -> "ParetoArchive":
        first = non_dominated_sort([ind.fitness for ind in pop])[0]
        members = sorted((pop[i] for i in first),
                         key=lambda ind: (ind.fitness.n_cnot, ind.fitness.energy, ind.id))
        return cls(generation, [(ind.fitness, ind.id) for ind in members])

    @property
    def min_energy(self) -> float:
        return min(f.energy for f, _ in self.entries)

    @property
    def min_cnot(self) -> int:
        return min(f.n_cnot for f, _ in self.entries)

    def to_json(self) -> list[dict]:
        return [{"energy": f.energy, "n_cnot": f.n_cnot, "circuit_id": i}
                for f, i in self.entries]
