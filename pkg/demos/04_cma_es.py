# %% [markdown]
# # CMA-ES
#
# `minimize` runs one optimization.  A vectorized objective receives a whole
# population as a (lambda, n) matrix.

# %%
import numpy as np

from mogvqe.cma import CMAES, CmaOptions, minimize, minimize_restarts


def rosenbrock(X):
    return np.sum(100 * (X[:, 1:] - X[:, :-1] ** 2) ** 2 + (1 - X[:, :-1]) ** 2, axis=-1)


res = minimize(rosenbrock, np.zeros(10), CmaOptions(seed=0, max_evaluations=100_000,
                                                     f_tolerance=1e-15, f_target=1e-7),
               vectorized=True)
print(res.termination_reason, res.evaluations_used, res.f_best)

# %% [markdown]
# Restarts draw a fresh start point each time and keep the best result.

# %%
def rastrigin(X):
    return 10 * X.shape[1] + np.sum(X ** 2 - 10 * np.cos(2 * np.pi * X), axis=1)


for k in (1, 5):
    r = minimize_restarts(rastrigin, lambda g: g.uniform(-5, 5, 5), CmaOptions(seed=2), k,
                          vectorized=True)
    print(f"{k} restart(s): f = {r.f_best:.4f} after {r.evaluations_used} evaluations")

# %% [markdown]
# The ask/tell interface exposes the loop; separable mode keeps a diagonal
# covariance, so it scales to thousands of parameters.

# %%
es = CMAES(np.ones(2000), CmaOptions(mode="separable", seed=0))
while not es.stop():
    X = es.ask()
    es.tell(X, np.sum(X ** 2, axis=1))
    if es.generation == 200:
        break
print("sep-CMA-ES, n=2000, best after 200 generations:", es.f_best)
