# %% [markdown]
# # NSGA-II selection
#
# Fitness is the pair (energy, CNOT count); both are minimized.

# %%
import numpy as np

from mogvqe.moo import (Fitness, Individual, crowding_distance, environmental_select,
                        non_dominated_sort)

points = [(1, 2), (2, 1), (2, 2), (0.5, 4), (3, 3)]
print("fronts:", non_dominated_sort(points))
print("crowding of (0,2),(1,1),(2,0):", crowding_distance([(0, 2), (1, 1), (2, 0)]))

# %% [markdown]
# Environmental selection keeps the best `n` of parents and offspring by
# front index, then by crowding distance, then by lower id.

# %%
rng = np.random.default_rng(0)
pop = [Individual(None, Fitness(float(e), int(c)), np.zeros(0), i)
       for i, (e, c) in enumerate(zip(rng.normal(size=12), rng.integers(0, 10, 12)))]
kept = environmental_select(pop[:6], pop[6:], 6)
for ind in kept:
    print(ind.id, ind.fitness, "rank", ind.rank, "crowding", round(ind.crowding, 3))
