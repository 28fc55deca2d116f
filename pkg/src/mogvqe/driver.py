"""MoG-VQE run orchestration.

Every generation mutates each parent once, optimizes the angles of every
child with CMA-ES, and keeps the best ``population`` circuits of parents and
children by NSGA-II ranking.  The run stops once the lowest energy is within
``chemical_accuracy`` of the target energy or after ``max_generations``.

Randomness is derived per task from ``(master_seed, purpose, generation,
individual id)``, so results do not depend on how evaluations are spread
over worker threads.
"""
from __future__ import annotations

import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import ansatz
from .ansatz import Circuit, HeaConfig, export_qasm, hea_circuit, init_circuit, mutate
from .cma import CmaOptions, minimize_restarts
from .moo import Fitness, Individual, ParetoArchive, environmental_select, rank_population
from .pauli import Hamiltonian, exact_ground_energy, expectation, magnetization, parity

__all__ = [
    "FidelityParams",
    "RunConfig",
    "RunRecord",
    "evaluate_individual",
    "fidelity_estimate",
    "run_hea",
    "run_mogvqe",
    "symmetry_report",
    "task_rng",
    "write_run",
]

log = logging.getLogger(__name__)

_INIT, _MUTATE, _EVAL, _HEA = 0, 1, 2, 3
SYMMETRY_DRIFT_LIMIT = 5e-3


@dataclass
class RunConfig:
    population: int = 64
    mutation_probability: float = 1.0
    max_generations: int = 50
    chemical_accuracy: float = 1e-3
    cma: CmaOptions = field(default_factory=CmaOptions)
    n_cma_restarts: int = 1
    insert_block_kind: str = "A"
    worker_count: int = 16
    master_seed: int = 0
    target_energy: float | None = None
    warm_start: bool = False
    identity_init: bool = False
    dense_limit: int = 14

    def __post_init__(self):
        if isinstance(self.cma, dict):
            self.cma = CmaOptions.from_dict(self.cma)
        if self.population < 2:
            raise ValueError("population must be >= 2")
        if not 0.0 <= self.mutation_probability <= 1.0:
            raise ValueError("mutation_probability must be in [0, 1]")
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")
        if self.n_cma_restarts < 1:
            raise ValueError("n_cma_restarts must be >= 1")
        if self.max_generations < 0:
            raise ValueError("max_generations must be >= 0")
        if self.insert_block_kind not in ansatz.BLOCK_ANGLES:
            raise ValueError(f"unknown block kind {self.insert_block_kind!r}")
        if self.master_seed < 0:
            raise ValueError("master_seed must be non-negative")

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config key(s): {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "RunConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["cma"] = self.cma.to_dict()
        return out


def task_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Independent generator for one task, keyed by non-negative integers."""
    ss = np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


# --------------------------------------------------------------------------
# evaluation

def evaluate_individual(circuit: Circuit, h: Hamiltonian, cfg: RunConfig,
                        rng: np.random.Generator, x0=None):
    """Optimize the angles of ``circuit`` for ``h``.

    Returns ``(Fitness, best_angles, info)``.  ``x0`` (e.g. inherited angles)
    replaces the random start of the first CMA-ES run.
    """
    if circuit.n_qubits != h.n_qubits:
        raise ValueError(f"circuit has {circuit.n_qubits} qubits, "
                         f"Hamiltonian has {h.n_qubits}")
    psi0 = h.hf_vector()
    prog = circuit.program()
    n_cnot = circuit.cnot_count
    if prog.n_params == 0:
        energy = float(expectation(h, psi0))
        return Fitness(energy, n_cnot), np.zeros(0), {"evaluations": 0, "termination": "empty"}

    tables = h.tables()

    def objective(X):
        return prog.energies(psi0, X, tables)

    starts = []

    def sampler(gen):
        if x0 is not None and not starts:
            starts.append(1)
            return np.asarray(x0, dtype=np.float64)
        starts.append(1)
        return ansatz.random_angles(gen, prog.n_params)

    seed = int(rng.integers(0, 2 ** 62))
    opts = CmaOptions(**{**cfg.cma.to_dict(), "seed": seed})
    res = minimize_restarts(objective, sampler, opts, cfg.n_cma_restarts, vectorized=True)
    info = {"evaluations": res.evaluations_used, "termination": res.termination_reason}
    return Fitness(float(res.f_best), n_cnot), res.x_best, info


def _evaluate_task(args):
    ind, h, cfg, generation = args
    t0 = time.perf_counter()
    rng = task_rng(cfg.master_seed, _EVAL, generation, ind.id)
    x0 = ind.circuit.angles() if cfg.warm_start and ind.parent_id is not None else None
    try:
        fit, angles, info = evaluate_individual(ind.circuit, h, cfg, rng, x0=x0)
    except Exception as exc:
        raise RuntimeError(f"evaluation of individual {ind.id} in generation "
                           f"{generation} failed: {exc}") from exc
    ind.fitness = fit
    ind.best_angles = angles
    ind.circuit = ind.circuit.with_angles(angles)
    info["wall_time"] = time.perf_counter() - t0
    ind.info = info
    return ind


def _evaluate_all(inds, h, cfg, generation, pool):
    tasks = [(ind, h, cfg, generation) for ind in inds]
    if pool is None:
        return [_evaluate_task(t) for t in tasks]
    out = []
    for start in range(0, len(tasks), cfg.worker_count):
        out.extend(pool.map(_evaluate_task, tasks[start:start + cfg.worker_count]))
    return out


# --------------------------------------------------------------------------
# main loop

@dataclass
class RunRecord:
    archives: list[ParetoArchive]
    evaluations: list[dict]
    best: Individual
    termination_reason: str
    target_energy: float | None
    config: RunConfig
    individuals: dict[int, Individual] = field(repr=False, default_factory=dict)
    hf_energy: float = math.nan
    symmetry: dict = field(default_factory=dict)

    @property
    def generations(self) -> int:
        return self.archives[-1].generation

    def best_energy_history(self) -> list[float]:
        return [a.min_energy for a in self.archives]

    def min_cnot_history(self) -> list[int]:
        return [a.min_cnot for a in self.archives]

    def best_accurate_cnot(self, tolerance: float | None = None) -> int | None:
        """Fewest CNOTs among archived circuits within ``tolerance`` of the target."""
        if self.target_energy is None:
            return None
        tol = self.config.chemical_accuracy if tolerance is None else tolerance
        counts = [f.n_cnot for a in self.archives for f, _ in a.entries
                  if f.energy <= self.target_energy + tol]
        return min(counts) if counts else None


def _eval_log(ind, generation):
    return {"event": "evaluation", "generation": generation, "id": ind.id,
            "parent": ind.parent_id, "energy": ind.fitness.energy,
            "n_cnot": ind.fitness.n_cnot, "n_blocks": len(ind.circuit),
            "cma_evaluations": ind.info.get("evaluations", 0),
            "cma_termination": ind.info.get("termination"),
            "wall_time": ind.info.get("wall_time", 0.0)}


def run_mogvqe(h: Hamiltonian, cfg: RunConfig,
               callback: Callable[[ParetoArchive], None] | None = None) -> RunRecord:
    """Run the multiobjective genetic search on ``h``."""
    if h.n_qubits < 2:
        raise ValueError("MoG-VQE needs at least 2 qubits")
    target = cfg.target_energy
    if target is None and h.n_qubits <= cfg.dense_limit:
        target = exact_ground_energy(h, dense_limit=cfg.dense_limit)
    kind = cfg.insert_block_kind

    placeholder = Fitness(math.inf, 0)
    pop = [Individual(init_circuit(h.n_qubits, task_rng(cfg.master_seed, _INIT, 0, i), kind),
                      placeholder, np.zeros(0), i)
           for i in range(cfg.population)]
    next_id = cfg.population

    archives: list[ParetoArchive] = []
    evaluations: list[dict] = []
    individuals: dict[int, Individual] = {}

    def record(generation, population, new):
        evaluations.extend(_eval_log(ind, generation) for ind in new)
        arch = ParetoArchive.from_population(generation, population)
        archives.append(arch)
        for _, i in arch.entries:
            individuals.setdefault(i, next(p for p in population if p.id == i))
        log.info("generation %d: min energy %.8f, min CNOTs %d, front size %d",
                 generation, arch.min_energy, arch.min_cnot, len(arch.entries))
        if callback is not None:
            callback(arch)
        return arch

    def converged(arch):
        return target is not None and arch.min_energy <= target + cfg.chemical_accuracy

    pool = ThreadPoolExecutor(cfg.worker_count) if cfg.worker_count > 1 else None
    try:
        pop = _evaluate_all(pop, h, cfg, 0, pool)
        rank_population(pop)
        arch = record(0, pop, pop)
        reason = "chemical_accuracy" if converged(arch) else "max_generations"
        generation = 0
        while reason == "max_generations" and generation < cfg.max_generations:
            generation += 1
            offspring, clones = [], []
            for parent in pop:
                rng = task_rng(cfg.master_seed, _MUTATE, generation, parent.id)
                if rng.random() < cfg.mutation_probability:
                    child = mutate(parent.circuit, rng, kind=kind, identity_init=cfg.identity_init)
                    offspring.append(Individual(child, placeholder, np.zeros(0), next_id,
                                                parent_id=parent.id))
                    next_id += 1
                else:
                    clones.append(parent)
            offspring = _evaluate_all(offspring, h, cfg, generation, pool)
            pop = environmental_select(pop, offspring + clones, cfg.population)
            arch = record(generation, pop, offspring)
            if converged(arch):
                reason = "chemical_accuracy"
    finally:
        if pool is not None:
            pool.shutdown()

    front = [individuals[i] for _, i in archives[-1].entries]
    best = min(front, key=lambda ind: (ind.fitness.energy, ind.fitness.n_cnot, ind.id))
    hf_energy = float(expectation(h, h.hf_vector()))
    return RunRecord(archives, evaluations, best, reason, target, cfg, individuals,
                     hf_energy, symmetry_report(h, best.circuit))


def symmetry_report(h: Hamiltonian, circuit: Circuit, angles=None) -> dict:
    """Magnetization and parity of the prepared state against the HF state."""
    psi0 = h.hf_vector()
    prog = circuit.program()
    theta = circuit.angles() if angles is None else angles
    psi = prog.states(psi0, theta)[0] if prog.n_params else psi0
    m0, p0 = magnetization(psi0), parity(psi0)
    m1, p1 = magnetization(psi), parity(psi)
    drift = max(abs(m1 - m0), abs(p1 - p0))
    return {"hf_magnetization": m0, "hf_parity": p0, "magnetization": m1, "parity": p1,
            "max_drift": drift, "within_limit": bool(drift < SYMMETRY_DRIFT_LIMIT)}


# --------------------------------------------------------------------------
# output

def _dump(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def write_run(record: RunRecord, out_dir) -> Path:
    """Write the run directory: per-generation fronts, circuits, QASM, logs, summary."""
    out = Path(out_dir)
    (out / "circuits").mkdir(parents=True, exist_ok=True)
    for arch in record.archives:
        _dump(out / f"pareto_{arch.generation}.json", arch.to_json())
    for i, ind in sorted(record.individuals.items()):
        data = ansatz.circuit_to_json(ind.circuit)
        data.update(id=i, parent=ind.parent_id, energy=ind.fitness.energy,
                    n_cnot=ind.fitness.n_cnot)
        _dump(out / "circuits" / f"{i}.json", data)
    (out / "best.qasm").write_text(export_qasm(record.best.circuit), encoding="utf-8")
    with open(out / "run.jsonl", "w", encoding="utf-8") as fh:
        for ev in record.evaluations:
            fh.write(json.dumps(ev) + "\n")
        for arch in record.archives:
            fh.write(json.dumps({"event": "generation", "generation": arch.generation,
                                 "min_energy": arch.min_energy, "min_cnot": arch.min_cnot,
                                 "front": arch.to_json()}) + "\n")
    cfg = record.config.to_dict()
    cfg.pop("worker_count")
    best = record.best
    summary = {
        "config": cfg,
        "target_energy": record.target_energy,
        "hf_energy": record.hf_energy,
        "termination_reason": record.termination_reason,
        "generations": record.generations,
        "best": {"id": best.id, "energy": best.fitness.energy, "n_cnot": best.fitness.n_cnot,
                 "n_blocks": len(best.circuit),
                 "error": None if record.target_energy is None
                 else best.fitness.energy - record.target_energy},
        "min_cnot_within_accuracy": record.best_accurate_cnot(),
        "history": [{"generation": a.generation, "min_energy": a.min_energy,
                     "min_cnot": a.min_cnot, "front_size": len(a.entries)}
                    for a in record.archives],
        "symmetry": record.symmetry,
    }
    _dump(out / "summary.json", summary)
    return out


# --------------------------------------------------------------------------
# baseline and utilities

def run_hea(h: Hamiltonian, layers: int, cfg: RunConfig | None = None, repeat: int = 0):
    """Optimize the layered hardware-efficient ansatz with sep-CMA-ES.

    Returns ``(energy, angles)``.
    """
    cfg = cfg or RunConfig()
    prog = hea_circuit(HeaConfig(h.n_qubits, layers))
    psi0 = h.hf_vector()
    tables = h.tables()
    rng = task_rng(cfg.master_seed, _HEA, layers, repeat)
    seed = int(rng.integers(0, 2 ** 62))
    opts = CmaOptions(**{**cfg.cma.to_dict(), "seed": seed, "mode": "separable"})
    res = minimize_restarts(lambda X: prog.energies(psi0, X, tables),
                            lambda g: ansatz.random_angles(g, prog.n_params),
                            opts, cfg.n_cma_restarts, vectorized=True)
    return float(res.f_best), res.x_best


@dataclass(frozen=True)
class FidelityParams:
    n_rot: int
    n_cnot: int
    eps_rot: float
    eps_cnot: float

    def __post_init__(self):
        if self.n_rot < 0 or self.n_cnot < 0:
            raise ValueError("gate counts must be non-negative")
        for eps in (self.eps_rot, self.eps_cnot):
            if not 0.0 <= eps < 1.0:
                raise ValueError("error probabilities must lie in [0, 1)")


def fidelity_estimate(fp: FidelityParams) -> float:
    """Uncorrelated-error fidelity ``(1 - eps_rot)**n_rot * (1 - eps_cnot)**n_cnot``."""
    return (1.0 - fp.eps_rot) ** fp.n_rot * (1.0 - fp.eps_cnot) ** fp.n_cnot
