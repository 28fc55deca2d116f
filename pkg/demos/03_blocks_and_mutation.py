# %% [markdown]
# # Circuit blocks and mutation
#
# A circuit is a sequence of two-qubit blocks.  Kind A carries four RY angles
# around one CNOT.  Kind B carries five angles around two CNOTs and becomes the
# identity when its last two angles are zero.

# %%
import numpy as np

from mogvqe.ansatz import Block, Circuit, export_qasm, init_circuit, lower_block, mutate

for g in lower_block(Block("B", 0, 1, (0.1, 0.2, 0.3, 0.0, 0.0))):
    print(g)

# %% [markdown]
# Initial circuits are either a checkerboard of nearest-neighbour blocks or
# a random list of N to 4N blocks, with equal probability.

# %%
rng = np.random.default_rng(5)
c = init_circuit(4, rng)
print(len(c), "blocks,", c.cnot_count, "CNOTs")

# %% [markdown]
# Mutation inserts a block, deletes one, or applies up to ten of those steps
# at once, with weights 2 : 1 : 0.25.

# %%
for _ in range(5):
    c, op = mutate(c, rng, return_operation=True)
    print(f"{op:>6}: {len(c)} blocks, {c.cnot_count} CNOTs")

print(export_qasm(Circuit(2, (Block("A", 0, 1, (0.1, 0.2, 0.3, 0.4)),))))
