"""Multiobjective genetic VQE: NSGA-II over block circuits with CMA-ES angle optimization."""
from .ansatz import (Block, Circuit, HeaConfig, cnot_count, export_qasm, hea_circuit,
                     init_circuit, lower_block, mutate)
from .cma import CmaOptions, CmaResult, minimize, minimize_restarts
from .driver import (FidelityParams, RunConfig, RunRecord, evaluate_individual,
                     fidelity_estimate, run_hea, run_mogvqe, write_run)
from .moo import Fitness, Individual, ParetoArchive, crowding_distance, dominates, \
    environmental_select, non_dominated_sort
from .pauli import (Hamiltonian, PauliTerm, exact_ground_energy, expectation,
                    load_hamiltonian, magnetization, parity, parse_hamiltonian)
from .sim import Gate, GateProgram, apply_cnot, apply_rotation, basis_state, run_circuit

__version__ = "0.1.0"
