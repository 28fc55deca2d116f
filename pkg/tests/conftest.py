"""Dense-matrix oracles shared by the tests.

Everything here is built from Kronecker products of 2x2 matrices so that it
shares no code with the bit-twiddling kernels under test.  Qubit 0 is the
rightmost Kronecker factor (least significant bit).
"""
import numpy as np
import pytest

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"X": X, "Y": Y, "Z": Z}
P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)


def embed(ops: dict, n: int) -> np.ndarray:
    """Kronecker product with ``ops[q]`` on qubit ``q`` and identity elsewhere."""
    out = np.array([[1.0 + 0j]])
    for q in reversed(range(n)):
        out = np.kron(out, ops.get(q, I2))
    return out


def rotation_matrix(axis: str, theta: float) -> np.ndarray:
    p = PAULI[axis]
    return np.cos(theta / 2) * I2 - 1j * np.sin(theta / 2) * p


def cnot_matrix(control: int, target: int, n: int) -> np.ndarray:
    return embed({control: P0}, n) + embed({control: P1, target: X}, n)


def gate_matrix(gate, n: int) -> np.ndarray:
    if gate.kind == "CNOT":
        return cnot_matrix(gate.control, gate.qubit, n)
    return embed({gate.qubit: rotation_matrix(gate.kind[1], gate.angle)}, n)


def circuit_unitary(gates, n: int) -> np.ndarray:
    U = np.eye(1 << n, dtype=complex)
    for g in gates:
        U = gate_matrix(g, n) @ U
    return U


def dense_hamiltonian(h) -> np.ndarray:
    H = np.zeros((h.dim, h.dim), dtype=complex)
    for t in h.terms:
        H += t.coefficient * embed({q: PAULI[a] for q, a in t.ops}, h.n_qubits)
    return H


def random_state(rng, n: int) -> np.ndarray:
    psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return psi / np.linalg.norm(psi)


def random_gates(rng, n: int, count: int):
    from mogvqe.sim import Gate
    gates = []
    for _ in range(count):
        if n > 1 and rng.random() < 0.3:
            c, t = rng.choice(n, size=2, replace=False)
            gates.append(Gate("CNOT", int(t), control=int(c)))
        else:
            kind = ("RX", "RY", "RZ")[rng.integers(3)]
            gates.append(Gate(kind, int(rng.integers(n)), angle=float(rng.uniform(-7, 7))))
    return gates


def phase_aligned_distance(U: np.ndarray, V: np.ndarray) -> float:
    """max |U - e^{i phi} V| over entries, with phi fitted from the trace."""
    overlap = np.trace(V.conj().T @ U)
    phase = overlap / abs(overlap) if abs(overlap) > 1e-14 else 1.0
    return float(np.max(np.abs(U - phase * V)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(number, ok, detail)``.

    The line is printed immediately and repeated in the terminal summary so it
    stays visible without ``-s``.
    """
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def report(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
