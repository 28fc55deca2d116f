"""Dense statevector simulator.

States are plain ``complex128`` numpy arrays of length ``2**n``.  Qubit 0 is
the least significant bit of the basis-state index, so the bitstring "10"
(qubit 0 set) is index 1.

The gate kernels are numba-compiled loops over amplitude pairs
``(i, i + 2**q)``; the same kernels back the one-gate-at-a-time API and the
batched energy evaluator used inside the angle optimizer.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numba import njit

__all__ = [
    "AXES",
    "Gate",
    "GateProgram",
    "apply_cnot",
    "apply_gate",
    "apply_rotation",
    "basis_state",
    "n_qubits_of",
    "run_circuit",
]

AXES = ("X", "Y", "Z")
_OP_CODES = {"RX": 0, "RY": 1, "RZ": 2, "CNOT": 3}
_CNOT = 3


@dataclass(frozen=True)
class Gate:
    """A single gate.  ``control`` is only used by CNOT, ``angle`` only by rotations."""

    kind: str
    qubit: int
    control: int | None = None
    angle: float = 0.0

    def __post_init__(self):
        if self.kind not in _OP_CODES:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind == "CNOT":
            if self.control is None:
                raise ValueError("CNOT needs a control qubit")
            if self.control == self.qubit:
                raise ValueError("CNOT control and target must differ")


def n_qubits_of(psi: np.ndarray) -> int:
    dim = psi.shape[-1]
    n = dim.bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise ValueError(f"state dimension {dim} is not a power of two >= 2")
    return n


def basis_state(n_qubits: int, bits: str | Sequence[int]) -> np.ndarray:
    """Computational basis state; ``bits[i]`` is the value of qubit ``i``."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be positive")
    bits = [int(b) for b in bits]
    if len(bits) != n_qubits:
        raise ValueError(f"bitstring has {len(bits)} bits, expected {n_qubits}")
    if any(b not in (0, 1) for b in bits):
        raise ValueError("bitstring must contain only 0 and 1")
    psi = np.zeros(1 << n_qubits, dtype=np.complex128)
    psi[sum(b << i for i, b in enumerate(bits))] = 1.0
    return psi


# --------------------------------------------------------------------------
# kernels

@njit(cache=True, nogil=True)
def _rotate(psi, axis, q, theta):
    c = np.cos(0.5 * theta)
    s = np.sin(0.5 * theta)
    stride = 1 << q
    dim = psi.shape[0]
    if axis == 0:
        ms = -1j * s
        for base in range(0, dim, 2 * stride):
            for i0 in range(base, base + stride):
                i1 = i0 + stride
                a = psi[i0]
                b = psi[i1]
                psi[i0] = c * a + ms * b
                psi[i1] = ms * a + c * b
    elif axis == 1:
        for base in range(0, dim, 2 * stride):
            for i0 in range(base, base + stride):
                i1 = i0 + stride
                a = psi[i0]
                b = psi[i1]
                psi[i0] = c * a - s * b
                psi[i1] = s * a + c * b
    else:
        lo = c - 1j * s
        hi = c + 1j * s
        for base in range(0, dim, 2 * stride):
            for i0 in range(base, base + stride):
                psi[i0] *= lo
                psi[i0 + stride] *= hi


@njit(cache=True, nogil=True)
def _cnot(psi, control, target):
    cmask = 1 << control
    tmask = 1 << target
    for i in range(psi.shape[0]):
        if (i & cmask) and not (i & tmask):
            j = i | tmask
            tmp = psi[i]
            psi[i] = psi[j]
            psi[j] = tmp


@njit(cache=True, nogil=True)
def _run_program(psi, theta, ops, qubits, controls, pidx, scales):
    for g in range(ops.shape[0]):
        op = ops[g]
        if op == 3:
            _cnot(psi, controls[g], qubits[g])
        else:
            _rotate(psi, op, qubits[g], scales[g] * theta[pidx[g]])


@njit(cache=True, nogil=True)
def _expectation(psi, xmasks, diag):
    e = 0.0
    dim = psi.shape[0]
    for k in range(xmasks.shape[0]):
        x = xmasks[k]
        for b in range(dim):
            e += (np.conj(psi[b ^ x]) * diag[k, b] * psi[b]).real
    return e


@njit(cache=True, nogil=True)
def _batch_energies(thetas, psi0, ops, qubits, controls, pidx, scales, xmasks, diag):
    out = np.empty(thetas.shape[0])
    psi = np.empty_like(psi0)
    for r in range(thetas.shape[0]):
        psi[:] = psi0
        _run_program(psi, thetas[r], ops, qubits, controls, pidx, scales)
        out[r] = _expectation(psi, xmasks, diag)
    return out


@njit(cache=True, nogil=True)
def _batch_states(thetas, psi0, ops, qubits, controls, pidx, scales):
    out = np.empty((thetas.shape[0], psi0.shape[0]), dtype=np.complex128)
    for r in range(thetas.shape[0]):
        out[r, :] = psi0
        _run_program(out[r], thetas[r], ops, qubits, controls, pidx, scales)
    return out


# --------------------------------------------------------------------------
# gate-level API

def _check_qubit(psi, q):
    n = n_qubits_of(psi)
    if not 0 <= q < n:
        raise IndexError(f"qubit {q} out of range for {n}-qubit state")


def apply_rotation(psi: np.ndarray, axis: str, qubit: int, angle: float) -> np.ndarray:
    """Apply ``exp(-i angle/2 P)`` in place on ``qubit`` and return ``psi``."""
    _check_qubit(psi, qubit)
    _rotate(psi, AXES.index(axis.upper()), qubit, float(angle))
    return psi


def apply_cnot(psi: np.ndarray, control: int, target: int) -> np.ndarray:
    """Flip ``target`` on every amplitude whose ``control`` bit is set (in place)."""
    if control == target:
        raise ValueError("CNOT control and target must differ")
    _check_qubit(psi, control)
    _check_qubit(psi, target)
    _cnot(psi, control, target)
    return psi


def apply_gate(psi: np.ndarray, gate: Gate) -> np.ndarray:
    if gate.kind == "CNOT":
        return apply_cnot(psi, gate.control, gate.qubit)
    return apply_rotation(psi, gate.kind[1], gate.qubit, gate.angle)


def run_circuit(psi0: np.ndarray, gates: Iterable[Gate]) -> np.ndarray:
    """Apply ``gates`` in temporal order to a copy of ``psi0``."""
    psi = np.array(psi0, dtype=np.complex128, copy=True)
    for gate in gates:
        apply_gate(psi, gate)
    return psi


# --------------------------------------------------------------------------
# parametrized programs

class GateProgram:
    """A gate sequence whose rotation angles are ``scale * theta[param]``.

    This is the flat form every ansatz compiles to.  It can be turned into
    concrete :class:`Gate` lists, or evaluated for many angle vectors at once
    with :meth:`energies`.
    """

    def __init__(self, n_qubits: int, n_params: int, ops, qubits, controls, params, scales):
        self.n_qubits = int(n_qubits)
        self.n_params = int(n_params)
        self.ops = np.ascontiguousarray(ops, dtype=np.int64)
        self.qubits = np.ascontiguousarray(qubits, dtype=np.int64)
        self.controls = np.ascontiguousarray(controls, dtype=np.int64)
        self.params = np.ascontiguousarray(params, dtype=np.int64)
        self.scales = np.ascontiguousarray(scales, dtype=np.float64)
        if not (len(self.ops) == len(self.qubits) == len(self.controls)
                == len(self.params) == len(self.scales)):
            raise ValueError("program arrays differ in length")
        rot = self.ops != _CNOT
        if np.any(self.qubits < 0) or np.any(self.qubits >= self.n_qubits):
            raise ValueError("gate qubit out of range")
        cn = ~rot
        if np.any(self.controls[cn] < 0) or np.any(self.controls[cn] >= self.n_qubits):
            raise ValueError("CNOT control out of range")
        if np.any(self.controls[cn] == self.qubits[cn]):
            raise ValueError("CNOT control and target must differ")
        if np.any(self.params[rot] < 0) or np.any(self.params[rot] >= max(self.n_params, 1)):
            raise ValueError("rotation parameter index out of range")

    @classmethod
    def from_templates(cls, n_qubits: int, templates) -> "GateProgram":
        """Build from ``(kind, qubit, control, param, scale)`` tuples."""
        templates = list(templates)
        ops = [_OP_CODES[t[0]] for t in templates]
        qubits = [t[1] for t in templates]
        controls = [-1 if t[2] is None else t[2] for t in templates]
        params = [-1 if t[3] is None else t[3] for t in templates]
        scales = [1.0 if t[4] is None else t[4] for t in templates]
        used = [p for p in params if p >= 0]
        n_params = max(used) + 1 if used else 0
        return cls(n_qubits, n_params, ops, qubits, controls, params, scales)

    def __len__(self):
        return len(self.ops)

    @property
    def cnot_count(self) -> int:
        return int(np.count_nonzero(self.ops == _CNOT))

    @property
    def rotation_count(self) -> int:
        return len(self) - self.cnot_count

    def _angles(self, theta):
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape[-1] != self.n_params:
            raise ValueError(f"expected {self.n_params} angles, got {theta.shape[-1]}")
        return theta

    def gates(self, theta) -> list[Gate]:
        theta = self._angles(theta)
        names = ("RX", "RY", "RZ")
        out = []
        for op, q, c, p, s in zip(self.ops, self.qubits, self.controls, self.params, self.scales):
            if op == _CNOT:
                out.append(Gate("CNOT", int(q), control=int(c)))
            else:
                out.append(Gate(names[op], int(q), angle=float(s * theta[p])))
        return out

    def states(self, psi0: np.ndarray, thetas) -> np.ndarray:
        """Final states for a batch of angle vectors, shape ``(m, 2**n)``."""
        thetas = np.atleast_2d(self._angles(thetas))
        psi0 = self._check_state(psi0)
        return _batch_states(np.ascontiguousarray(thetas), psi0, self.ops, self.qubits,
                             self.controls, self.params, self.scales)

    def energies(self, psi0: np.ndarray, thetas, tables) -> np.ndarray:
        """Energies for a batch of angle vectors.

        ``tables`` is the ``(xmasks, diag)`` pair from
        :meth:`mogvqe.pauli.Hamiltonian.tables`.
        """
        thetas = np.atleast_2d(self._angles(thetas))
        psi0 = self._check_state(psi0)
        xmasks, diag = tables
        return _batch_energies(np.ascontiguousarray(thetas), psi0, self.ops, self.qubits,
                               self.controls, self.params, self.scales, xmasks, diag)

    def _check_state(self, psi0):
        psi0 = np.ascontiguousarray(psi0, dtype=np.complex128)
        if psi0.shape != (1 << self.n_qubits,):
            raise ValueError(f"initial state has shape {psi0.shape}, "
                             f"expected ({1 << self.n_qubits},)")
        return psi0
