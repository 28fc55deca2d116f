import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mogvqe.moo import (Fitness, Individual, ParetoArchive, crowding_distance, dominates,
                        environmental_select, non_dominated_sort, rank_population)


def brute_force_fronts(points):
    """Peel off the non-dominated set repeatedly with a direct pairwise check."""
    remaining = list(range(len(points)))
    fronts = []
    while remaining:
        front = [i for i in remaining
                 if not any(all(points[j][k] <= points[i][k] for k in range(2))
                            and any(points[j][k] < points[i][k] for k in range(2))
                            for j in remaining)]
        fronts.append(front)
        remaining = [i for i in remaining if i not in front]
    return fronts


def make(points, start=0):
    return [Individual(None, Fitness(float(e), int(c)), np.zeros(0), start + i)
            for i, (e, c) in enumerate(points)]


def test_dominates_examples():
    assert dominates((-1.0, 5), (-0.5, 7))
    assert not dominates((-1.0, 5), (-1.0, 5))
    assert not dominates((-1.0, 7), (-0.5, 5))
    assert not dominates((-0.5, 5), (-1.0, 7))


def test_sort_hand_case():
    assert non_dominated_sort([(1, 2), (2, 1), (2, 2)]) == [[0, 1], [2]]


def test_sort_identical():
    assert non_dominated_sort([(0.5, 3)] * 5) == [[0, 1, 2, 3, 4]]


def test_sort_empty():
    assert non_dominated_sort([]) == []


def test_sort_matches_brute_force(rng):
    for _ in range(20):
        pts = np.column_stack([rng.normal(size=100), rng.integers(0, 15, 100)]).tolist()
        assert non_dominated_sort(pts) == brute_force_fronts(pts)


def test_crowding_examples():
    assert crowding_distance([(0.0, 1)]) == [math.inf]
    assert crowding_distance([(0.0, 1), (1.0, 0)]) == [math.inf, math.inf]
    d = crowding_distance([(0, 2), (1, 1), (2, 0)])
    assert d[0] == d[2] == math.inf
    assert d[1] == pytest.approx(2.0, abs=1e-15)


def test_crowding_zero_range():
    d = crowding_distance([(0.0, 4), (1.0, 4), (3.0, 4)])
    assert d[1] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        crowding_distance([])


def test_select_all_retained():
    pop = make([(0, 3), (1, 1), (2, 2), (0.5, 2)])
    out = environmental_select(pop[:2], pop[2:], 4)
    assert sorted(i.id for i in out) == [0, 1, 2, 3]
    keys = [(i.rank, -i.crowding, i.id) for i in out]
    assert keys == sorted(keys)


def test_select_truncates_first_front_by_crowding():
    n = 5
    # n + 3 points on a straight trade-off line, unevenly spaced
    energies = [0.0, 0.1, 0.15, 0.5, 0.55, 0.9, 1.3, 2.0]
    pop = make([(e, 20 - 2 * k) for k, e in enumerate(energies)])
    out = environmental_select(pop[:4], pop[4:], n)
    dist = crowding_distance([p.fitness for p in pop])
    expected = sorted(range(len(pop)), key=lambda i: (-dist[i], i))[:n]
    assert sorted(i.id for i in out) == sorted(expected)


def test_select_two_fronts():
    n = 6
    front0 = [(float(k), 10 - k) for k in range(n - 1)]
    front1 = [(10.0, 20), (11.0, 19), (12.0, 18), (13.0, 17), (14.0, 16)]
    pop = make(front0 + front1)
    out = environmental_select(pop[:3], pop[3:], n)
    ids = sorted(i.id for i in out)
    assert ids[:n - 1] == list(range(n - 1))
    # both ends of front 1 are infinite; the lower id wins the tie
    assert ids[-1] == n - 1


def test_select_dedupes_clones_and_checks_size():
    pop = make([(0, 1), (1, 0)])
    out = environmental_select(pop, pop, 2)
    assert [i.id for i in out] == [0, 1]
    with pytest.raises(ValueError):
        environmental_select(pop, pop, 3)


def test_select_elitism(rng):
    for _ in range(30):
        pts = np.column_stack([rng.normal(size=40), rng.integers(0, 12, 40)])
        pop = make(pts.tolist())
        first = non_dominated_sort(pts)[0]
        n = int(rng.integers(len(first), 41))
        chosen = {i.id for i in environmental_select(pop[:20], pop[20:], n)}
        assert set(first) <= chosen


def test_rank_population_assigns():
    pop = make([(1, 2), (2, 1), (2, 2)])
    rank_population(pop)
    assert [p.rank for p in pop] == [0, 0, 1]
    assert pop[2].crowding == math.inf


def test_archive():
    pop = make([(-1.0, 5), (-0.5, 2), (-0.2, 8), (-1.2, 9)])
    arc = ParetoArchive.from_population(3, pop)
    assert arc.generation == 3
    assert [i for _, i in arc.entries] == [1, 0, 3]
    assert arc.min_energy == -1.2 and arc.min_cnot == 2
    assert arc.to_json()[0] == {"energy": -0.5, "n_cnot": 2, "circuit_id": 1}
    for fa, _ in arc.entries:
        assert not any(dominates(fb, fa) for fb, _ in arc.entries)


fitness = st.tuples(st.floats(-5, 5, allow_nan=False), st.integers(0, 30))


@settings(max_examples=200, deadline=None)
@given(st.lists(fitness, min_size=1, max_size=60))
def test_sort_is_partition(points):
    fronts = non_dominated_sort(points)
    flat = [i for f in fronts for i in f]
    assert sorted(flat) == list(range(len(points)))
    for k, front in enumerate(fronts):
        for i in front:
            # nothing in the same or a later front dominates i
            for later in fronts[k:]:
                assert not any(dominates(points[j], points[i]) for j in later)
            if k:
                assert any(dominates(points[j], points[i]) for j in fronts[k - 1])


@settings(max_examples=300, deadline=None)
@given(fitness, fitness)
def test_dominance_irreflexive_antisymmetric(a, b):
    assert not dominates(a, a)
    if a != b:
        assert not (dominates(a, b) and dominates(b, a))
