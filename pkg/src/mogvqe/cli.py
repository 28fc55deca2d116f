"""Command line interface: ``mogvqe {run,hea,exact,eval,export-qasm,fidelity}``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .ansatz import HeaConfig, circuit_from_json, export_qasm, hea_circuit
from .driver import (FidelityParams, RunConfig, evaluate_individual, fidelity_estimate,
                     run_hea, run_mogvqe, symmetry_report, task_rng, write_run)
from .pauli import exact_ground_energy, expectation, load_hamiltonian


def _config(args) -> RunConfig:
    data = {}
    if getattr(args, "config", None):
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise ValueError("config file must hold a JSON object")
    if getattr(args, "seed", None) is not None:
        data["master_seed"] = args.seed
    if getattr(args, "workers", None) is not None:
        data["worker_count"] = args.workers
    return RunConfig.from_dict(data)


def cmd_run(args):
    h = load_hamiltonian(args.hamiltonian)
    cfg = _config(args)
    record = run_mogvqe(h, cfg)
    out = write_run(record, args.out)
    best = record.best.fitness
    print(f"{record.termination_reason} after {record.generations} generation(s): "
          f"energy {best.energy:.10f} with {best.n_cnot} CNOTs -> {out}")


def cmd_hea(args):
    h = load_hamiltonian(args.hamiltonian)
    cfg = _config(args)
    prog = hea_circuit(HeaConfig(h.n_qubits, args.layers))
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["repeat", "layers", "n_cnot", "n_params", "energy"])
    for r in range(args.repeats):
        energy, _ = run_hea(h, args.layers, cfg, repeat=r)
        writer.writerow([r, args.layers, prog.cnot_count, prog.n_params, repr(energy)])


def cmd_exact(args):
    h = load_hamiltonian(args.hamiltonian)
    print(f"{exact_ground_energy(h):.12f}")


def cmd_eval(args):
    h = load_hamiltonian(args.hamiltonian)
    circuit = circuit_from_json(Path(args.circuit).read_text(encoding="utf-8"),
                                n_qubits=h.n_qubits)
    if circuit.n_qubits != h.n_qubits:
        raise ValueError(f"circuit has {circuit.n_qubits} qubits, "
                         f"Hamiltonian has {h.n_qubits}")
    if args.optimize:
        cfg = _config(args)
        _, angles, _ = evaluate_individual(circuit, h, cfg, task_rng(cfg.master_seed, 9))
        circuit = circuit.with_angles(angles)
    prog = circuit.program()
    psi0 = h.hf_vector()
    psi = prog.states(psi0, circuit.angles())[0] if prog.n_params else psi0
    sym = symmetry_report(h, circuit)
    print(json.dumps({"energy": float(expectation(h, psi)), "n_cnot": circuit.cnot_count,
                      "magnetization": sym["magnetization"], "parity": sym["parity"]}))


def cmd_export(args):
    circuit = circuit_from_json(Path(args.circuit).read_text(encoding="utf-8"))
    Path(args.out).write_text(export_qasm(circuit), encoding="utf-8")


def cmd_fidelity(args):
    print(f"{fidelity_estimate(FidelityParams(args.nrot, args.ncnot, args.eps_rot, args.eps_cnot)):.6f}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mogvqe", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("run", help="multiobjective genetic VQE search")
    s.add_argument("--hamiltonian", required=True)
    s.add_argument("--config", help="JSON object with RunConfig fields")
    s.add_argument("--out", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--workers", type=int)
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("hea", help="hardware-efficient ansatz baseline (CSV to stdout)")
    s.add_argument("--hamiltonian", required=True)
    s.add_argument("--layers", type=int, required=True)
    s.add_argument("--repeats", type=int, default=1)
    s.add_argument("--config")
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_hea)

    s = sub.add_parser("exact", help="exact ground-state energy")
    s.add_argument("--hamiltonian", required=True)
    s.set_defaults(func=cmd_exact)

    s = sub.add_parser("eval", help="energy and symmetry diagnostics of a stored circuit")
    s.add_argument("--hamiltonian", required=True)
    s.add_argument("--circuit", required=True)
    s.add_argument("--optimize", action="store_true",
                   help="re-optimize the angles with CMA-ES instead of using the stored ones")
    s.add_argument("--config")
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("export-qasm", help="write a circuit JSON file as OpenQASM 2.0")
    s.add_argument("--circuit", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_export)

    s = sub.add_parser("fidelity", help="uncorrelated-error fidelity estimate")
    s.add_argument("--nrot", type=int, required=True)
    s.add_argument("--ncnot", type=int, required=True)
    s.add_argument("--eps-rot", type=float, required=True)
    s.add_argument("--eps-cnot", type=float, required=True)
    s.set_defaults(func=cmd_fidelity)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ValueError, OSError) as exc:
        print(f"mogvqe: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
