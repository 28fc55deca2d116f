# %% [markdown]
# # Multiobjective search
#
# `run_mogvqe` evolves circuits for a Hamiltonian.  Every child gets its
# angles from CMA-ES.  The run stops once the lowest energy is within
# `chemical_accuracy` of the exact ground energy, which is computed
# automatically for small systems.

# %%
import tempfile

from mogvqe import data
from mogvqe.driver import RunConfig, run_mogvqe, write_run

h = data.load("parity4")
cfg = RunConfig(population=16, max_generations=10, master_seed=7, worker_count=4)
record = run_mogvqe(h, cfg, callback=lambda a: print(
    f"generation {a.generation}: min energy {a.min_energy:.6f}, min CNOTs {a.min_cnot}"))
print(record.termination_reason, "target", record.target_energy)
print("best:", record.best.fitness, "symmetry drift", record.symmetry["max_drift"])

# %% [markdown]
# The last Pareto front shows the trade-off between accuracy and CNOT count.

# %%
for fit, ident in record.archives[-1].entries:
    print(f"  {fit.n_cnot:3d} CNOTs  E = {fit.energy:.6f}  (circuit {ident})")

out = write_run(record, tempfile.mkdtemp(prefix="mogvqe-"))
print("run written to", out, sorted(p.name for p in out.iterdir()))
