"""Bundled test Hamiltonians."""
from importlib import resources

from ..pauli import Hamiltonian, parse_hamiltonian

NAMES = ("tfim4", "parity4")


def load(name: str) -> Hamiltonian:
    """Load a bundled Hamiltonian by name (``"tfim4"`` or ``"parity4"``)."""
    return parse_hamiltonian(resources.files(__package__).joinpath(f"{name}.ham").read_text())
