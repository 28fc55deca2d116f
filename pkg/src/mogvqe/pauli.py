"""Pauli-string Hamiltonians: parsing, expectation values, exact ground energy.

A term acts on basis state ``|b>`` as ``P|b> = i**ny (-1)**popcount(b & z) |b ^ x>``
where ``x`` marks qubits carrying X or Y, ``z`` marks qubits carrying Z or Y
and ``ny`` counts the Y factors.  Terms sharing the same ``x`` mask are folded
into one phase table, so an expectation value is a sum of permuted inner
products and never touches a matrix.

File format::

    qubits: 4
    hf: 1100
    # molecule=H2
    -0.5 I
    0.25 Z0 Z1
    0.1 X0 Y1   # trailing comments are fine
"""
from __future__ import annotations

import io
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .sim import basis_state, n_qubits_of

__all__ = [
    "DENSE_LIMIT",
    "Hamiltonian",
    "HamiltonianFormatError",
    "PauliTerm",
    "exact_ground_energy",
    "expectation",
    "load_hamiltonian",
    "magnetization",
    "parity",
    "parse_hamiltonian",
]

DENSE_LIMIT = 14
DROP_BELOW = 1e-12
_OP_RE = re.compile(r"^([XYZ])(\d+)$")
_META_RE = re.compile(r"^#\s*([A-Za-z_][\w.\-]*)\s*=\s*(.*?)\s*$")


class HamiltonianFormatError(ValueError):
    """Raised for malformed Hamiltonian text; ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class PauliTerm:
    coefficient: float
    ops: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        if not math.isfinite(self.coefficient):
            raise ValueError("coefficient must be finite")
        ops = tuple(sorted((int(q), str(a).upper()) for q, a in dict(self.ops).items()))
        if len(ops) != len(self.ops):
            raise ValueError("repeated qubit in Pauli term")
        for q, a in ops:
            if q < 0 or a not in "XYZ" or len(a) != 1:
                raise ValueError(f"invalid Pauli factor {a}{q}")
        object.__setattr__(self, "ops", ops)

    @classmethod
    def from_label(cls, coefficient: float, label: str) -> "PauliTerm":
        """``PauliTerm.from_label(0.5, "Z0 Z1")``; ``"I"`` or ``""`` is the identity."""
        ops = []
        for tok in label.split():
            if tok == "I":
                continue
            m = _OP_RE.match(tok)
            if m is None:
                raise ValueError(f"bad Pauli factor {tok!r}")
            ops.append((int(m.group(2)), m.group(1)))
        if len(set(q for q, _ in ops)) != len(ops):
            raise ValueError(f"repeated qubit in {label!r}")
        return cls(float(coefficient), tuple(ops))

    @property
    def label(self) -> str:
        return " ".join(f"{a}{q}" for q, a in self.ops) or "I"

    @property
    def max_qubit(self) -> int:
        return max((q for q, _ in self.ops), default=-1)

    def masks(self) -> tuple[int, int, int]:
        """``(x_mask, z_mask, n_y)``."""
        x = z = ny = 0
        for q, a in self.ops:
            if a in "XY":
                x |= 1 << q
            if a in "ZY":
                z |= 1 << q
            ny += a == "Y"
        return x, z, ny


def _merge(terms: Iterable[PauliTerm]) -> tuple[PauliTerm, ...]:
    acc: dict[tuple, float] = {}
    for t in terms:
        acc[t.ops] = acc.get(t.ops, 0.0) + t.coefficient
    return tuple(PauliTerm(c, ops) for ops, c in acc.items() if abs(c) >= DROP_BELOW)


@dataclass(frozen=True)
class Hamiltonian:
    """Real-weighted sum of Pauli strings plus the reference (Hartree-Fock) bitstring.

    Terms with the same Pauli string are merged on construction.
    """

    n_qubits: int
    terms: tuple[PauliTerm, ...]
    hf_state: str
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        if len(self.hf_state) != self.n_qubits or set(self.hf_state) - {"0", "1"}:
            raise ValueError(f"hf_state {self.hf_state!r} is not a {self.n_qubits}-bit string")
        terms = _merge(self.terms)
        for t in terms:
            if t.max_qubit >= self.n_qubits:
                raise ValueError(f"term {t.label} acts outside {self.n_qubits} qubits")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "metadata", dict(self.metadata))

    def __add__(self, other: "Hamiltonian") -> "Hamiltonian":
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit counts differ")
        return Hamiltonian(self.n_qubits, self.terms + other.terms, self.hf_state, self.metadata)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def hf_vector(self) -> np.ndarray:
        return basis_state(self.n_qubits, self.hf_state)

    @cached_property
    def _tables(self):
        dim = self.dim
        idx = np.arange(dim, dtype=np.int64)
        groups: dict[int, np.ndarray] = {}
        for t in self.terms:
            x, z, ny = t.masks()
            sign = 1.0 - 2.0 * (np.bitwise_count(idx & z) & 1)
            row = groups.setdefault(x, np.zeros(dim, dtype=np.complex128))
            row += t.coefficient * (1j ** ny) * sign
        xs = sorted(groups)
        xmasks = np.array(xs, dtype=np.int64)
        diag = np.array([groups[x] for x in xs], dtype=np.complex128).reshape(len(xs), dim)
        xmasks.flags.writeable = False
        diag.flags.writeable = False
        return xmasks, diag

    def tables(self) -> tuple[np.ndarray, np.ndarray]:
        """``(xmasks, diag)``: ``H|b> = sum_k diag[k, b] |b ^ xmasks[k]>``."""
        return self._tables

    def sparse_matrix(self) -> scipy.sparse.csr_matrix:
        xmasks, diag = self._tables
        dim = self.dim
        cols = np.tile(np.arange(dim, dtype=np.int64), len(xmasks))
        rows = (np.arange(dim, dtype=np.int64)[None, :] ^ xmasks[:, None]).ravel()
        return scipy.sparse.csr_matrix((diag.ravel(), (rows, cols)), shape=(dim, dim))

    def to_text(self) -> str:
        lines = [f"qubits: {self.n_qubits}", f"hf: {self.hf_state}"]
        lines += [f"# {k}={v}" for k, v in self.metadata.items()]
        lines += [f"{t.coefficient!r} {t.label}" for t in self.terms]
        return "\n".join(lines) + "\n"


def parse_hamiltonian(text) -> Hamiltonian:
    """Parse the line-oriented Hamiltonian format from a string or text stream."""
    if not isinstance(text, str):
        text = text.read()
    n_qubits = None
    hf = None
    metadata: dict[str, str] = {}
    raw: list[tuple[int, PauliTerm]] = []
    for lineno, line in enumerate(io.StringIO(text), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            m = _META_RE.match(stripped)
            if m:
                metadata[m.group(1)] = m.group(2)
            continue
        body = stripped.split("#", 1)[0].strip()
        key, sep, value = body.partition(":")
        if sep:
            key = key.strip().lower()
            value = value.strip()
            if key == "qubits":
                if n_qubits is not None:
                    raise HamiltonianFormatError("duplicate qubits header", lineno)
                try:
                    n_qubits = int(value)
                except ValueError:
                    raise HamiltonianFormatError(f"bad qubit count {value!r}", lineno) from None
                if n_qubits < 1:
                    raise HamiltonianFormatError("qubit count must be positive", lineno)
            elif key == "hf":
                if n_qubits is None:
                    raise HamiltonianFormatError("hf line before qubits header", lineno)
                if len(value) != n_qubits or set(value) - {"0", "1"}:
                    raise HamiltonianFormatError(
                        f"hf bitstring {value!r} does not have {n_qubits} bits", lineno)
                hf = value
            else:
                raise HamiltonianFormatError(f"unknown header {key!r}", lineno)
            continue
        if n_qubits is None:
            raise HamiltonianFormatError("missing 'qubits:' header", lineno)
        coeff, _, label = body.replace("\t", " ").partition(" ")
        try:
            c = float(coeff)
        except ValueError:
            raise HamiltonianFormatError(f"bad coefficient {coeff!r}", lineno) from None
        if not math.isfinite(c):
            raise HamiltonianFormatError("coefficient must be finite", lineno)
        if not label.strip():
            raise HamiltonianFormatError("term has no operators (use 'I' for identity)", lineno)
        tokens = label.split()
        if "I" in tokens and len(tokens) > 1:
            raise HamiltonianFormatError("'I' must appear alone", lineno)
        try:
            term = PauliTerm.from_label(c, label)
        except ValueError as exc:
            raise HamiltonianFormatError(str(exc), lineno) from None
        if term.max_qubit >= n_qubits:
            raise HamiltonianFormatError(
                f"qubit index {term.max_qubit} >= qubits ({n_qubits})", lineno)
        raw.append((lineno, term))
    if n_qubits is None:
        raise HamiltonianFormatError("missing 'qubits:' header")
    if hf is None:
        raise HamiltonianFormatError("missing 'hf:' line")
    return Hamiltonian(n_qubits, tuple(t for _, t in raw), hf, metadata)


def load_hamiltonian(path) -> Hamiltonian:
    return parse_hamiltonian(Path(path).read_text(encoding="utf-8"))


def _check_dim(h: Hamiltonian, psi: np.ndarray):
    if psi.shape[-1] != h.dim:
        raise ValueError(f"state dimension {psi.shape[-1]} does not match "
                         f"{h.n_qubits}-qubit Hamiltonian")


def expectation(h: Hamiltonian, psi: np.ndarray) -> float | np.ndarray:
    """``<psi|H|psi>`` for a state or a stack of states (last axis is the amplitude)."""
    psi = np.asarray(psi, dtype=np.complex128)
    _check_dim(h, psi)
    norms = np.sum(np.abs(psi) ** 2, axis=-1)
    if np.any(np.abs(norms - 1.0) > 1e-8):
        raise ValueError("state is not normalized")
    xmasks, diag = h.tables()
    idx = np.arange(h.dim)
    total = np.zeros(psi.shape[:-1], dtype=np.complex128)
    for x, d in zip(xmasks, diag):
        total += np.sum(np.conj(psi[..., idx ^ x]) * d * psi, axis=-1)
    assert np.all(np.abs(total.imag) < 1e-10), "non-real expectation value"
    return total.real if total.ndim else float(total.real)


def exact_ground_energy(h: Hamiltonian, dense_limit: int = DENSE_LIMIT,
                        method: str = "auto") -> float:
    """Lowest eigenvalue of ``H``.

    ``method`` is ``"dense"``, ``"sparse"`` (Lanczos via ARPACK) or ``"auto"``
    (dense up to 10 qubits).
    """
    if h.n_qubits > dense_limit:
        raise ValueError(f"{h.n_qubits} qubits exceeds the exact-diagonalization "
                         f"limit of {dense_limit}")
    if method == "auto":
        method = "dense" if h.n_qubits <= 10 else "sparse"
    mat = h.sparse_matrix()
    if method == "dense" or h.dim <= 2:
        return float(np.linalg.eigvalsh(mat.toarray())[0])
    if method != "sparse":
        raise ValueError(f"unknown method {method!r}")
    v0 = np.full(h.dim, 1.0 / math.sqrt(h.dim), dtype=mat.dtype)
    vals = scipy.sparse.linalg.eigsh(mat, k=1, which="SA", v0=v0, tol=0,
                                     return_eigenvectors=False)
    return float(vals[0])


def _z_signs(n):
    idx = np.arange(1 << n)
    return 1.0 - 2.0 * ((idx[None, :] >> np.arange(n)[:, None]) & 1)


def magnetization(psi: np.ndarray) -> float:
    """Sum of ``<Z_i>`` over all qubits."""
    n = n_qubits_of(psi)
    prob = np.abs(np.asarray(psi)) ** 2
    return float(np.sum(_z_signs(n) @ prob))


def parity(psi: np.ndarray) -> float:
    """``<Z_0 Z_1 ... Z_{n-1}>``."""
    n = n_qubits_of(psi)
    prob = np.abs(np.asarray(psi)) ** 2
    sign = 1.0 - 2.0 * (np.bitwise_count(np.arange(1 << n)) & 1)
    return float(sign @ prob)
