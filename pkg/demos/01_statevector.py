# %% [markdown]
# # Statevector simulation
#
# States are plain complex128 arrays of length 2**n.  Qubit 0 is the least
# significant bit of the basis index, and bitstrings are written qubit 0 first.

# %%
import math

import numpy as np

from mogvqe.sim import Gate, GateProgram, apply_cnot, apply_rotation, basis_state, run_circuit

psi = basis_state(2, "00")
psi = apply_rotation(psi, "Y", 0, math.pi / 2)   # in place
psi = apply_cnot(psi, 0, 1)
print("Bell state amplitudes:", np.round(psi, 6))

# %% [markdown]
# `run_circuit` takes a gate list and leaves its input untouched.

# %%
gates = [Gate("RY", 0, angle=math.pi / 2), Gate("CNOT", 1, control=0), Gate("RZ", 1, angle=0.3)]
out = run_circuit(basis_state(2, "00"), gates)
print("norm after 3 gates:", np.vdot(out, out).real)

# %% [markdown]
# A `GateProgram` binds angles late: each rotation reads `scale * theta[param]`.
# Evaluating a whole batch of angle vectors is what the optimizer uses.

# %%
prog = GateProgram.from_templates(2, [("RY", 0, None, 0, 1.0), ("CNOT", 1, 0, None, None),
                                      ("RY", 1, None, 1, -0.5)])
thetas = np.random.default_rng(0).uniform(-math.pi, math.pi, size=(4, prog.n_params))
states = prog.states(basis_state(2, "00"), thetas)
print("batch of states:", states.shape)
