"""CMA-ES for unconstrained continuous minimization.

Two covariance models:

* ``"full"``: the standard (mu/mu_w, lambda)-CMA-ES with rank-one and rank-mu
  covariance updates and cumulative step-size adaptation;
* ``"separable"``: sep-CMA-ES, where the covariance is diagonal and the
  learning rates are scaled up by ``(n + 1.5) / 3``.  Every iteration is O(n)
  apart from sampling.

Defaults follow Hansen's tutorial settings.  Selection is rank based, so only
the ordering of objective values matters.

>>> res = minimize(lambda x: float(x @ x), np.ones(3), CmaOptions(seed=1))
>>> res.f_best < 1e-6
True
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "CMAES",
    "CmaOptions",
    "CmaResult",
    "ObjectiveError",
    "minimize",
    "minimize_restarts",
]


class ObjectiveError(ValueError):
    """The objective returned a non-finite value."""


@dataclass
class CmaOptions:
    """Optimizer settings.

    ``f_tolerance`` stops a run once the per-generation best objective value
    has varied by less than this over the last ``tol_window`` generations
    (default ``10 + ceil(30 n / lambda)``).  ``max_evaluations`` defaults to
    ``500 n``, ``popsize`` to ``4 + floor(3 ln n)``.
    """

    sigma0: float = 0.5
    f_tolerance: float = 1e-5
    max_evaluations: int | None = None
    popsize: int | None = None
    mode: str = "full"
    seed: int = 0
    tol_window: int | None = None
    f_target: float | None = None

    def __post_init__(self):
        if not self.sigma0 > 0:
            raise ValueError("sigma0 must be positive")
        if not self.f_tolerance > 0:
            raise ValueError("f_tolerance must be positive")
        if self.popsize is not None and self.popsize < 2:
            raise ValueError("popsize must be >= 2")
        if self.max_evaluations is not None and self.max_evaluations < 1:
            raise ValueError("max_evaluations must be positive")
        if self.mode not in ("full", "separable"):
            raise ValueError(f"mode must be 'full' or 'separable', not {self.mode!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "CmaOptions":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown CMA option(s): {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class CmaResult:
    x_best: np.ndarray
    f_best: float
    evaluations_used: int
    termination_reason: str
    generations: int = 0
    history: list[float] = field(default_factory=list, repr=False)


class CMAES:
    """Ask-and-tell CMA-ES state.

    >>> es = CMAES(np.zeros(2), CmaOptions(seed=3))
    >>> X = es.ask()
    >>> es.tell(X, np.sum(X**2, axis=1))
    """

    def __init__(self, x0, opts: CmaOptions | None = None):
        opts = opts or CmaOptions()
        x0 = np.array(x0, dtype=np.float64).ravel()
        n = x0.size
        if n < 1:
            raise ValueError("search space dimension must be >= 1")
        self.opts = opts
        self.n = n
        self.separable = opts.mode == "separable"
        self.rng = np.random.Generator(np.random.PCG64(opts.seed))

        lam = opts.popsize or 4 + int(3 * math.log(n))
        mu = lam // 2
        w = math.log((lam + 1) / 2) - np.log(np.arange(1, mu + 1))
        w /= w.sum()
        mueff = 1.0 / np.sum(w ** 2)
        self.lam, self.mu, self.weights, self.mueff = lam, mu, w, mueff

        self.cs = (mueff + 2) / (n + mueff + 5)
        self.ds = 1 + 2 * max(0.0, math.sqrt((mueff - 1) / (n + 1)) - 1) + self.cs
        self.cc = (4 + mueff / n) / (n + 4 + 2 * mueff / n)
        c1 = 2 / ((n + 1.3) ** 2 + mueff)
        cmu = min(1 - c1, 2 * (mueff - 2 + 1 / mueff) / ((n + 2) ** 2 + mueff))
        if self.separable:
            scale = (n + 1.5) / 3
            c1 = min(1.0, c1 * scale)
            cmu = min(1 - c1, cmu * scale)
        self.c1, self.cmu = c1, cmu
        self.chin = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n * n))

        self.mean = x0
        self.sigma = float(opts.sigma0)
        self.ps = np.zeros(n)
        self.pc = np.zeros(n)
        if self.separable:
            self.diag_c = np.ones(n)
        else:
            self.C = np.eye(n)
            self.B = np.eye(n)
        self.D = np.ones(n)
        self._eigen_eval = 0
        self._eigen_gap = 0.5 * lam / ((c1 + cmu) * n)

        self.generation = 0
        self.evaluations = 0
        self.x_best = x0.copy()
        self.f_best = math.inf
        self.best_history: list[float] = []
        self.gen_best: list[float] = []
        self._z = None
        self.max_evaluations = opts.max_evaluations or 500 * n
        self.tol_window = opts.tol_window or 10 + math.ceil(30 * n / lam)

    def ask(self) -> np.ndarray:
        """Sample ``lambda`` candidates, shape ``(lambda, n)``."""
        z = self.rng.standard_normal((self.lam, self.n))
        if self.separable:
            y = z * self.D
        else:
            y = (z * self.D) @ self.B.T
        self._z, self._y = z, y
        return self.mean + self.sigma * y

    def tell(self, X, fvals) -> None:
        fvals = np.asarray(fvals, dtype=np.float64)
        if fvals.shape != (self.lam,):
            raise ValueError(f"expected {self.lam} objective values, got shape {fvals.shape}")
        if not np.all(np.isfinite(fvals)):
            bad = int(np.flatnonzero(~np.isfinite(fvals))[0])
            raise ObjectiveError(
                f"objective returned {fvals[bad]!r} at generation {self.generation} "
                f"for x = {np.asarray(X)[bad]!r}")
        n, mu, w = self.n, self.mu, self.weights
        self.evaluations += self.lam
        order = np.argsort(fvals, kind="stable")
        if fvals[order[0]] < self.f_best:
            self.f_best = float(fvals[order[0]])
            self.x_best = np.array(X[order[0]], dtype=np.float64)
        self.gen_best.append(float(fvals[order[0]]))
        self.best_history.append(self.f_best)

        sel = order[:mu]
        y_sel = self._y[sel]
        z_sel = self._z[sel]
        y_w = w @ y_sel
        z_w = w @ z_sel
        self.mean = self.mean + self.sigma * y_w

        if self.separable:
            cinv_half_yw = z_w
        else:
            cinv_half_yw = self.B @ z_w
        self.ps = (1 - self.cs) * self.ps + math.sqrt(self.cs * (2 - self.cs) * self.mueff) * cinv_half_yw
        ps_norm = float(np.linalg.norm(self.ps))
        hsig = ps_norm / math.sqrt(1 - (1 - self.cs) ** (2 * (self.generation + 1))) \
            < (1.4 + 2 / (n + 1)) * self.chin
        self.pc = (1 - self.cc) * self.pc + hsig * math.sqrt(self.cc * (2 - self.cc) * self.mueff) * y_w

        c1, cmu = self.c1, self.cmu
        decay = 1 - c1 - cmu + (1 - hsig) * c1 * self.cc * (2 - self.cc)
        if self.separable:
            self.diag_c = decay * self.diag_c + c1 * self.pc ** 2 + cmu * (w @ y_sel ** 2)
            self.D = np.sqrt(self.diag_c)
        else:
            self.C = decay * self.C + c1 * np.outer(self.pc, self.pc) + cmu * (y_sel.T * w) @ y_sel
            if self.evaluations > self._eigen_eval + self._eigen_gap:
                self._update_eigensystem()

        self.sigma *= math.exp(min(1.0, (self.cs / self.ds) * (ps_norm / self.chin - 1)))
        self.generation += 1

    def _update_eigensystem(self):
        self._eigen_eval = self.evaluations
        self.C = np.triu(self.C) + np.triu(self.C, 1).T
        vals, self.B = np.linalg.eigh(self.C)
        self.D = np.sqrt(np.maximum(vals, 1e-300))

    def stop(self) -> str | None:
        """Termination reason, or ``None`` to continue."""
        opts = self.opts
        if opts.f_target is not None and self.f_best <= opts.f_target:
            return "tolerance"
        if len(self.gen_best) >= self.tol_window:
            recent = self.gen_best[-self.tol_window:]
            if max(recent) - min(recent) < opts.f_tolerance:
                return "tolerance"
        if self.evaluations + self.lam > self.max_evaluations:
            return "budget"
        if self.sigma * float(np.max(self.D)) < 1e-12 * max(1.0, float(np.max(np.abs(self.mean)))):
            return "stagnation"
        if np.max(self.D) > 1e7 * np.min(self.D):
            return "stagnation"
        return None

    def result(self, reason: str) -> CmaResult:
        return CmaResult(self.x_best.copy(), self.f_best, self.evaluations, reason,
                         self.generation, list(self.best_history))


def minimize(objective: Callable, x0, opts: CmaOptions | None = None,
             vectorized: bool = False) -> CmaResult:
    """Minimize ``objective`` from ``x0``.

    With ``vectorized=True`` the objective receives the whole ``(lambda, n)``
    population and returns ``lambda`` values.
    """
    es = CMAES(x0, opts)
    while True:
        reason = es.stop()
        if reason is not None:
            return es.result(reason)
        X = es.ask()
        if vectorized:
            f = objective(X)
        else:
            f = [objective(x) for x in X]
        es.tell(X, f)


def minimize_restarts(objective: Callable, x0_sampler: Callable, opts: CmaOptions | None = None,
                      n_restarts: int = 1, vectorized: bool = False) -> CmaResult:
    """Best of ``n_restarts`` independent runs.

    Run ``k`` uses seed ``opts.seed + k`` both for the optimizer and for the
    generator passed to ``x0_sampler``, so a single restart reproduces
    ``minimize(objective, x0_sampler(rng(seed)), opts)``.
    """
    if n_restarts < 1:
        raise ValueError("n_restarts must be >= 1")
    opts = opts or CmaOptions()
    best = None
    total = 0
    for k in range(n_restarts):
        seed = opts.seed + k
        run_opts = CmaOptions(**{**opts.to_dict(), "seed": seed})
        x0 = x0_sampler(np.random.Generator(np.random.PCG64(seed)))
        res = minimize(objective, x0, run_opts, vectorized=vectorized)
        total += res.evaluations_used
        if best is None or res.f_best < best.f_best:
            best = res
    best.evaluations_used = total
    return best
