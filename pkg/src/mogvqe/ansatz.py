"""Block-structured circuits: the individuals of the genetic search.

Two block kinds are available.  Kind ``"A"`` is a CNOT dressed by Y rotations
on both sides (4 angles, 1 CNOT).  Kind ``"B"`` is a basis-dressed
controlled-RY built from two CNOTs (5 angles, 9 rotations, 2 CNOTs); with
``theta4 = theta5 = 0`` it is the identity for any ``theta1..theta3``.

Also here: the layered hardware-efficient baseline (HEA), OpenQASM 2.0 export
and the circuit JSON format.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .sim import Gate, GateProgram

__all__ = [
    "BLOCK_ANGLES",
    "BLOCK_CNOTS",
    "Block",
    "Circuit",
    "HeaConfig",
    "MUTATION_WEIGHTS",
    "circuit_from_json",
    "circuit_to_json",
    "cnot_count",
    "export_qasm",
    "hea_circuit",
    "init_circuit",
    "lower_block",
    "mutate",
    "random_angles",
]

# (gate, role, angle slot, scale); role "c" = control qubit, "t" = target qubit
_LAYOUT = {
    "A": (
        ("RY", "c", 0, 1.0),
        ("RY", "t", 1, 1.0),
        ("CNOT", None, None, None),
        ("RY", "c", 2, 1.0),
        ("RY", "t", 3, 1.0),
    ),
    "B": (
        ("RY", "c", 0, 1.0),
        ("RZ", "c", 1, 1.0),
        ("RZ", "t", 2, 1.0),
        ("RY", "t", 3, 0.5),
        ("CNOT", None, None, None),
        ("RY", "t", 3, -0.5),
        ("CNOT", None, None, None),
        ("RZ", "t", 2, -1.0),
        ("RZ", "t", 4, 1.0),
        ("RZ", "c", 1, -1.0),
        ("RY", "c", 0, -1.0),
    ),
}
BLOCK_ANGLES = {"A": 4, "B": 5}
BLOCK_CNOTS = {"A": 1, "B": 2}

MUTATION_WEIGHTS = {"insert": 2.0, "delete": 1.0, "large": 0.25}
LARGE_MUTATION_STEPS = 10


def random_angles(rng: np.random.Generator, size) -> np.ndarray:
    """Uniform on (-pi, pi]."""
    return math.pi - rng.uniform(0.0, 2.0 * math.pi, size)


@dataclass(frozen=True)
class Block:
    kind: str
    control: int
    target: int
    angles: tuple[float, ...] = field(default=None)

    def __post_init__(self):
        if self.kind not in _LAYOUT:
            raise ValueError(f"unknown block kind {self.kind!r}")
        if self.control == self.target:
            raise ValueError("block control and target must differ")
        if self.control < 0 or self.target < 0:
            raise ValueError("negative qubit index")
        angles = (0.0,) * BLOCK_ANGLES[self.kind] if self.angles is None else self.angles
        angles = tuple(float(a) for a in angles)
        if len(angles) != BLOCK_ANGLES[self.kind]:
            raise ValueError(f"kind {self.kind} block takes {BLOCK_ANGLES[self.kind]} angles")
        object.__setattr__(self, "angles", angles)

    @property
    def n_angles(self) -> int:
        return BLOCK_ANGLES[self.kind]

    @property
    def n_cnots(self) -> int:
        return BLOCK_CNOTS[self.kind]

    def templates(self, offset: int = 0):
        qubit = {"c": self.control, "t": self.target}
        for gate, role, slot, scale in _LAYOUT[self.kind]:
            if gate == "CNOT":
                yield ("CNOT", self.target, self.control, None, None)
            else:
                yield (gate, qubit[role], None, offset + slot, scale)


def lower_block(block: Block, angles: Sequence[float] | None = None) -> list[Gate]:
    """Concrete gate list for one block (uses ``block.angles`` unless given)."""
    theta = block.angles if angles is None else tuple(angles)
    if len(theta) != block.n_angles:
        raise ValueError(f"kind {block.kind} block takes {block.n_angles} angles")
    out = []
    for kind, q, c, p, s in block.templates():
        if kind == "CNOT":
            out.append(Gate("CNOT", q, control=c))
        else:
            out.append(Gate(kind, q, angle=s * theta[p]))
    return out


@dataclass(frozen=True)
class Circuit:
    """Ordered blocks on ``n_qubits`` qubits.  Immutable; mutation builds a new one."""

    n_qubits: int
    blocks: tuple[Block, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        for b in self.blocks:
            if max(b.control, b.target) >= self.n_qubits:
                raise ValueError(f"block on ({b.control}, {b.target}) outside "
                                 f"{self.n_qubits} qubits")

    def __len__(self):
        return len(self.blocks)

    @property
    def n_params(self) -> int:
        return sum(b.n_angles for b in self.blocks)

    @property
    def cnot_count(self) -> int:
        return sum(b.n_cnots for b in self.blocks)

    def angles(self) -> np.ndarray:
        return np.array([a for b in self.blocks for a in b.angles], dtype=np.float64)

    def with_angles(self, theta) -> "Circuit":
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} angles, got {theta.shape}")
        blocks, k = [], 0
        for b in self.blocks:
            blocks.append(replace(b, angles=tuple(theta[k:k + b.n_angles])))
            k += b.n_angles
        return Circuit(self.n_qubits, tuple(blocks))

    def program(self) -> GateProgram:
        templates, offset = [], 0
        for b in self.blocks:
            templates.extend(b.templates(offset))
            offset += b.n_angles
        prog = GateProgram.from_templates(self.n_qubits, templates)
        prog.n_params = offset
        return prog

    def gates(self, theta=None) -> list[Gate]:
        return self.program().gates(self.angles() if theta is None else theta)


def cnot_count(circuit: Circuit) -> int:
    return circuit.cnot_count


def _random_block(n_qubits, rng, kind, identity_init=False) -> Block:
    control, target = rng.choice(n_qubits, size=2, replace=False)
    angles = random_angles(rng, BLOCK_ANGLES[kind])
    if kind == "B" and identity_init:
        angles[3:] = 0.0
    return Block(kind, int(control), int(target), tuple(angles))


def init_circuit(n_qubits: int, rng: np.random.Generator, kind: str = "A") -> Circuit:
    """Random initial individual.

    With probability 1/2 a checkerboard of ``n - 1`` blocks on pairs
    (0,1), (2,3), ... then (1,2), (3,4), ...; otherwise between ``n`` and
    ``4n`` blocks on random ordered qubit pairs.
    """
    if n_qubits < 2:
        raise ValueError("need at least 2 qubits")
    if rng.random() < 0.5:
        pairs = [(i, i + 1) for i in range(0, n_qubits - 1, 2)]
        pairs += [(i, i + 1) for i in range(1, n_qubits - 1, 2)]
        blocks = [Block(kind, c, t, tuple(random_angles(rng, BLOCK_ANGLES[kind])))
                  for c, t in pairs]
    else:
        count = int(rng.integers(n_qubits, 4 * n_qubits + 1))
        blocks = [_random_block(n_qubits, rng, kind) for _ in range(count)]
    return Circuit(n_qubits, tuple(blocks))


def _draw(rng, weights: dict[str, float]) -> str:
    names = list(weights)
    w = np.array([weights[k] for k in names])
    return names[int(rng.choice(len(names), p=w / w.sum()))]


def _insert(blocks, n_qubits, rng, kind, identity_init):
    pos = int(rng.integers(0, len(blocks) + 1))
    blocks.insert(pos, _random_block(n_qubits, rng, kind, identity_init))


def _delete(blocks, rng):
    if blocks:
        del blocks[int(rng.integers(0, len(blocks)))]


def mutate(circuit: Circuit, rng: np.random.Generator, kind: str = "A",
           identity_init: bool = False, return_operation: bool = False):
    """Insert (weight 2), delete (weight 1) or large-scale (weight 0.25) mutation.

    The large-scale operation performs 10 inserts/deletes drawn 2:1.
    ``identity_init`` starts inserted kind-B blocks at their identity setting.
    """
    op = _draw(rng, MUTATION_WEIGHTS)
    blocks = list(circuit.blocks)
    if op == "insert":
        _insert(blocks, circuit.n_qubits, rng, kind, identity_init)
    elif op == "delete":
        _delete(blocks, rng)
    else:
        step_weights = {k: MUTATION_WEIGHTS[k] for k in ("insert", "delete")}
        for _ in range(LARGE_MUTATION_STEPS):
            if _draw(rng, step_weights) == "insert":
                _insert(blocks, circuit.n_qubits, rng, kind, identity_init)
            else:
                _delete(blocks, rng)
    child = Circuit(circuit.n_qubits, tuple(blocks))
    return (child, op) if return_operation else child


# --------------------------------------------------------------------------
# hardware-efficient baseline

@dataclass(frozen=True)
class HeaConfig:
    n_qubits: int
    layers: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        if self.layers < 0:
            raise ValueError("layers must be >= 0")


def hea_circuit(cfg: HeaConfig) -> GateProgram:
    """RZ-RX-RZ on every qubit, then ``layers`` x (CNOT chain, RX-RZ on every qubit).

    ``3n + 2pn`` angles and ``p(n - 1)`` CNOTs.
    """
    n = cfg.n_qubits
    templates = []
    k = 0
    for q in range(n):
        for gate in ("RZ", "RX", "RZ"):
            templates.append((gate, q, None, k, 1.0))
            k += 1
    for _ in range(cfg.layers):
        for q in range(n - 1):
            templates.append(("CNOT", q + 1, q, None, None))
        for q in range(n):
            for gate in ("RX", "RZ"):
                templates.append((gate, q, None, k, 1.0))
                k += 1
    prog = GateProgram.from_templates(n, templates)
    prog.n_params = k
    return prog


# --------------------------------------------------------------------------
# serialization

def export_qasm(circuit: Circuit | GateProgram, angles=None) -> str:
    """OpenQASM 2.0 text using only rx/ry/rz/cx."""
    if isinstance(circuit, Circuit):
        prog = circuit.program()
        angles = circuit.angles() if angles is None else angles
    else:
        prog = circuit
    if angles is None:
        raise ValueError("angles are required for a gate program")
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{prog.n_qubits}];"]
    for g in prog.gates(angles):
        if g.kind == "CNOT":
            lines.append(f"cx q[{g.control}],q[{g.qubit}];")
        else:
            lines.append(f"{g.kind.lower()}({g.angle!r}) q[{g.qubit}];")
    return "\n".join(lines) + "\n"


def circuit_to_json(circuit: Circuit, angles=None) -> dict:
    """``{"n_qubits": n, "blocks": [{kind, control, target, angles}, ...]}``."""
    if angles is not None:
        circuit = circuit.with_angles(angles)
    return {
        "n_qubits": circuit.n_qubits,
        "blocks": [{"kind": b.kind, "control": b.control, "target": b.target,
                    "angles": list(b.angles)} for b in circuit.blocks],
    }


def circuit_from_json(data, n_qubits: int | None = None) -> Circuit:
    """Inverse of :func:`circuit_to_json`; also accepts a bare list of blocks."""
    if isinstance(data, str):
        data = json.loads(data)
    if isinstance(data, dict):
        blocks = data["blocks"]
        n_qubits = data.get("n_qubits", n_qubits)
    else:
        blocks = data
    parsed = [Block(b["kind"], int(b["control"]), int(b["target"]),
                    tuple(b["angles"]) if b.get("angles") is not None else None)
              for b in blocks]
    if n_qubits is None:
        n_qubits = 1 + max((max(b.control, b.target) for b in parsed), default=1)
    return Circuit(int(n_qubits), tuple(parsed))
