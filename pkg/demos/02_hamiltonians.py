# %% [markdown]
# # Pauli Hamiltonians
#
# The text format has two headers followed by one term per line:
#
#     qubits: 2
#     hf: 00
#     # key=value lines are kept as metadata
#     -1.0 Z0 Z1
#     -1.0 X0

# %%
from mogvqe import data
from mogvqe.pauli import exact_ground_energy, expectation, magnetization, parity, parse_hamiltonian

h = parse_hamiltonian("""qubits: 2
hf: 00
# model=tfim
-1.0 Z0 Z1
-1.0 X0
-1.0 X1
""")
print(h.metadata, [t.label for t in h.terms])
print("HF energy   :", expectation(h, h.hf_vector()))
print("exact energy:", exact_ground_energy(h))

# %% [markdown]
# Two 4-qubit models ship with the package.  `parity4` conserves the number
# of up spins, so magnetization and parity of the HF state are good checks on
# a prepared state.

# %%
for name in data.NAMES:
    hb = data.load(name)
    psi = hb.hf_vector()
    print(f"{name}: {len(hb.terms)} terms, E0 = {exact_ground_energy(hb):.10f}, "
          f"HF magnetization {magnetization(psi):+.1f}, parity {parity(psi):+.1f}")
