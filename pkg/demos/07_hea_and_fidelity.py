# %% [markdown]
# # Hardware-efficient baseline and noise estimate
#
# The layered ansatz has 3N + 2pN angles and p(N - 1) CNOTs.  It is optimized
# with separable CMA-ES.

# %%
from mogvqe import data
from mogvqe.ansatz import HeaConfig, hea_circuit
from mogvqe.driver import FidelityParams, RunConfig, fidelity_estimate, run_hea
from mogvqe.pauli import exact_ground_energy

h = data.load("tfim4")
print("exact:", exact_ground_energy(h))
for p in (1, 2, 4):
    prog = hea_circuit(HeaConfig(h.n_qubits, p))
    energy, _ = run_hea(h, p, RunConfig(master_seed=0))
    print(f"p={p}: {prog.cnot_count} CNOTs, {prog.n_params} angles, E = {energy:.6f}")

# %% [markdown]
# With independent gate errors the success probability of a circuit is the
# product of per-gate fidelities.

# %%
print(f"{fidelity_estimate(FidelityParams(32, 12, 1e-3, 1e-2)):.4f}")
