"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (the lines are repeated in the
terminal summary).  The end-to-end search criterion takes a few minutes.
"""
import filecmp
import math
import time

import numpy as np
import pytest
from scipy.optimize import minimize as scipy_minimize

from mogvqe import data
from mogvqe.ansatz import Block, HeaConfig, hea_circuit, lower_block
from mogvqe.cma import CMAES, CmaOptions, minimize
from mogvqe.driver import FidelityParams, RunConfig, fidelity_estimate, run_mogvqe, write_run
from mogvqe.moo import non_dominated_sort
from mogvqe.pauli import exact_ground_energy
from mogvqe.sim import basis_state, run_circuit

from conftest import circuit_unitary, phase_aligned_distance, random_gates, random_state


def test_simulator_matches_dense(criterion):
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 7))
        gates = random_gates(rng, n, int(rng.integers(0, 61)))
        psi0 = random_state(rng, n)
        expected = circuit_unitary(gates, n) @ psi0
        worst = max(worst, float(np.max(np.abs(run_circuit(psi0, gates) - expected))))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-10 and elapsed < 30
    criterion(1, ok, f"200 circuits, max deviation {worst:.2e}, {elapsed:.1f} s")
    assert ok


def test_norm_conservation(criterion):
    rng = np.random.default_rng(2)
    psi = run_circuit(basis_state(8, "0" * 8), random_gates(rng, 8, 1000))
    err = abs(1 - np.vdot(psi, psi).real)
    criterion(2, err < 1e-10, f"|1 - norm^2| = {err:.2e} after 1000 gates on 8 qubits")
    assert err < 1e-10


def test_block_identity_properties(criterion):
    rng = np.random.default_rng(3)
    worst_b = 0.0
    for _ in range(100):
        t1, t2, t3 = rng.uniform(-math.pi, math.pi, 3)
        U = circuit_unitary(lower_block(Block("B", 0, 1, (t1, t2, t3, 0.0, 0.0))), 2)
        worst_b = max(worst_b, phase_aligned_distance(U, np.eye(4)))

    def distance(p):
        U = circuit_unitary(lower_block(Block("A", 0, 1, tuple(p[:4]))), 2)
        return np.linalg.norm(U - np.exp(1j * p[4]) * np.eye(4), 2)

    best_a = min(scipy_minimize(distance, rng.uniform(-math.pi, math.pi, 5),
                                method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 5000}).fun
                 for _ in range(12))
    ok = worst_b < 1e-12 and best_a > 0.5
    criterion(3, ok, f"kind B identity residual {worst_b:.1e}; kind A min distance {best_a:.4f}")
    assert ok


def test_hea_cnot_bookkeeping(criterion):
    c10 = hea_circuit(HeaConfig(8, 10)).cnot_count
    c30 = hea_circuit(HeaConfig(8, 30)).cnot_count
    ok = (c10, c30) == (70, 210)
    criterion(4, ok, f"N=8: p=10 -> {c10} CNOTs, p=30 -> {c30} CNOTs")
    assert ok


def _sep_iteration_time(n, iterations=40):
    es = CMAES(np.zeros(n), CmaOptions(seed=0, mode="separable"))
    f = np.zeros(es.lam)
    t0 = time.perf_counter()
    for _ in range(iterations):
        es.tell(es.ask(), f)
    return (time.perf_counter() - t0) / iterations


def test_optimizer_benchmarks(criterion):
    def sphere(X):
        return np.sum(X ** 2, axis=-1)

    def rosenbrock(X):
        return np.sum(100 * (X[:, 1:] - X[:, :-1] ** 2) ** 2 + (1 - X[:, :-1]) ** 2, axis=-1)

    sphere_ok = 0
    for seed in range(10):
        opts = CmaOptions(seed=seed, max_evaluations=20000, f_tolerance=1e-15, f_target=1e-9)
        res = minimize(sphere, np.ones(20), opts, vectorized=True)
        sphere_ok += res.f_best < 1e-8 and res.evaluations_used <= 20000
    rosen_ok = 0
    for seed in range(10):
        opts = CmaOptions(seed=seed, max_evaluations=100_000, f_tolerance=1e-15,
                          f_target=1e-7)
        res = minimize(rosenbrock, np.zeros(10), opts, vectorized=True)
        rosen_ok += res.f_best < 1e-6 and res.evaluations_used <= 100_000
    t = {n: min(_sep_iteration_time(n) for _ in range(3)) for n in (10, 100, 1000)}
    growth = max(t[100] / t[10], t[1000] / t[100]) / 10
    ok = sphere_ok == 10 and rosen_ok >= 8 and growth <= 3
    criterion(5, ok, f"sphere-20 {sphere_ok}/10, Rosenbrock-10 {rosen_ok}/10, "
                     f"sep cost growth {growth:.2f}x linear")
    assert ok


def _reference_ranks(points):
    # rank = length of the longest dominance chain ending at the point;
    # lexicographic order puts every dominator before the points it dominates
    order = sorted(range(len(points)), key=lambda i: points[i])
    rank = {}
    for pos, i in enumerate(order):
        ei, ci = points[i]
        r = 0
        for j in order[:pos]:
            ej, cj = points[j]
            if ej <= ei and cj <= ci and (ej < ei or cj < ci):
                r = max(r, rank[j] + 1)
        rank[i] = r
    fronts = [[] for _ in range(max(rank.values()) + 1)] if rank else []
    for i in range(len(points)):
        fronts[rank[i]].append(i)
    return fronts


def test_nondominated_sort_oracle(criterion):
    rng = np.random.default_rng(6)
    mismatches = 0
    for _ in range(1000):
        n = int(rng.integers(1, 201))
        energy = np.round(rng.normal(size=n), int(rng.integers(1, 6)))
        cnots = rng.integers(0, int(rng.integers(1, 40)), n)
        points = [(float(e), int(c)) for e, c in zip(energy, cnots)]
        mismatches += non_dominated_sort(points) != _reference_ranks(points)
    criterion(6, mismatches == 0, f"1000 point sets, {mismatches} mismatches")
    assert mismatches == 0


def _monotone(record):
    e, c = record.best_energy_history(), record.min_cnot_history()
    return all(b <= a for a, b in zip(e, e[1:])) and all(b <= a for a, b in zip(c, c[1:]))


@pytest.fixture(scope="module")
def search_runs():
    runs = {}
    for name in data.NAMES:
        h = data.load(name)
        runs[name] = (exact_ground_energy(h),
                      [run_mogvqe(h, RunConfig(population=64, max_generations=30,
                                               master_seed=seed))
                       for seed in range(10)])
    return runs


@pytest.mark.slow
def test_end_to_end_convergence(criterion, search_runs):
    ok = True
    details = []
    for name, (exact, records) in search_runs.items():
        hits = 0
        for rec in records:
            converged = (rec.best.fitness.energy <= exact + 1e-3 and rec.generations <= 30)
            hits += converged and rec.archives[-1].min_cnot <= 6
        ok &= hits >= 8
        gens = max(rec.generations for rec in records)
        cnots = max(rec.archives[-1].min_cnot for rec in records)
        details.append(f"{name} {hits}/10 (max {gens} generations, "
                       f"front-0 min CNOTs <= {cnots})")
    criterion(7, ok, ", ".join(details))
    assert ok


@pytest.mark.slow
def test_front_monotonicity(criterion, search_runs):
    records = [rec for _, recs in search_runs.values() for rec in recs]
    # runs that cannot stop early so the fronts evolve over many generations
    for name in data.NAMES:
        h = data.load(name)
        for seed in range(3):
            records.append(run_mogvqe(h, RunConfig(population=16, max_generations=10,
                                                   chemical_accuracy=1e-12,
                                                   master_seed=100 + seed)))
    bad = sum(not _monotone(rec) for rec in records)
    generations = sum(rec.generations for rec in records)
    criterion(8, bad == 0, f"{len(records)} runs, {generations} generations, {bad} violations")
    assert bad == 0


def test_fidelity_claim(criterion):
    value = fidelity_estimate(FidelityParams(32, 12, 1e-3, 1e-2))
    ok = value > 0.85 and abs(value - 0.8585) <= 5e-4
    criterion(9, ok, f"fidelity(32, 12, 1e-3, 1e-2) = {value:.6f}")
    assert ok


def test_determinism_across_workers(criterion, tmp_path):
    h = data.load("tfim4")
    dirs = []
    for k, workers in enumerate((1, 4, 4)):
        cfg = RunConfig(population=16, max_generations=4, chemical_accuracy=1e-12,
                        worker_count=workers, master_seed=2024)
        dirs.append(write_run(run_mogvqe(h, cfg), tmp_path / f"run{k}"))
    names = ["summary.json"] + sorted(p.name for p in dirs[0].glob("pareto_*.json"))
    differing = []
    for other in dirs[1:]:
        _, mismatch, errors = filecmp.cmpfiles(dirs[0], other, names, shallow=False)
        differing += mismatch + errors
    ok = not differing and len(names) == 6
    criterion(10, ok, f"{len(names)} files compared over worker_count 1/4/4, "
                      f"{len(differing)} differ")
    assert ok
