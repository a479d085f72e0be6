"""SCV minimization over ``(omega, phi_1..phi_n)`` with evolution strategies.

Two strategies are available:

* ``ONE_PLUS_ONE_ES`` -- elitist single-parent search with Rechenberg's 1/5
  success rule for the step size.
* ``CMA_ES`` -- (mu/mu_w, lambda) covariance matrix adaptation with rank-one and
  rank-mu updates and cumulative step-size adaptation.

Both run on the unconstrained vector ``x = (log omega, phi_1, ..., phi_n)``.
Independent restarts share the evaluation budget and keep the global best.
Within a CMA-ES generation the objective values may be computed by a process
pool; the generation is only updated once all of them are in, so the
trajectory is the same as with sequential evaluation.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable

import numpy as np

from .analysis import DegenerateFormError, compute_scv
from .core import CosineSquareForm
from .precision import DEFAULT_POLICY, PrecisionPolicy

__all__ = [
    "PENALTY",
    "OptConfig",
    "OptResult",
    "Strategy",
    "auto_omega",
    "decode",
    "encode",
    "minimize",
    "objective",
    "optimize_full",
]

PENALTY = 1e12

# 1/5 success rule
SUCCESS_WINDOW = 20
STEP_UP = 1.5
STEP_DOWN = 1.5 ** -0.25

# stop a CMA-ES run (and move on to the next restart) below this step size
MIN_STEP = 1e-12
MAX_CONDITION = 1e14


class Strategy(enum.Enum):
    ONE_PLUS_ONE_ES = "one_plus_one_es"
    CMA_ES = "cma_es"


@dataclass(frozen=True)
class OptConfig:
    """Optimizer settings.

    ``omega_init=None`` means AUTO (``2 pi/(1 + 0.1 n)``).  ``workers > 1``
    evaluates each CMA-ES generation in a process pool.
    """

    strategy: Strategy = Strategy.CMA_ES
    max_evals: int = 10_000
    seed: int = 0
    sigma0: float = 0.3
    omega_init: float | None = None
    restarts: int = 0
    target_scv: float | None = None
    popsize: int | None = None
    workers: int = 1
    policy: PrecisionPolicy = DEFAULT_POLICY

    def __post_init__(self):
        if isinstance(self.strategy, str):
            object.__setattr__(self, "strategy", Strategy(self.strategy))
        if self.max_evals < 1:
            raise ValueError("max_evals must be >= 1")
        if not self.sigma0 > 0:
            raise ValueError("sigma0 must be positive")
        if self.omega_init is not None and not self.omega_init > 0:
            raise ValueError("omega_init must be positive")
        if self.restarts < 0:
            raise ValueError("restarts must be non-negative")
        if self.popsize is not None and self.popsize < 2:
            raise ValueError("popsize must be >= 2")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class OptResult:
    best_form: CosineSquareForm
    best_scv: float
    evals_used: int
    history: list = field(default_factory=list)
    seed: int = 0
    layout: object = None  # HeuristicLayout when produced by the heuristic search


def auto_omega(n: int) -> float:
    return 2 * math.pi / (1 + 0.1 * n)


def decode(x) -> CosineSquareForm:
    x = np.asarray(x, dtype=float)
    return CosineSquareForm.from_phis(math.exp(x[0]), tuple(float(v) for v in x[1:]))


def encode(form: CosineSquareForm) -> np.ndarray:
    omega, phis = form.as_floats()
    return np.concatenate([[math.log(omega)], phis])


def objective(x, policy: PrecisionPolicy = DEFAULT_POLICY) -> float:
    """SCV of the form encoded by ``x``; :data:`PENALTY` when it cannot be computed."""
    try:
        scv = compute_scv(decode(x), policy)
    except (DegenerateFormError, ArithmeticError, ValueError):
        return PENALTY
    return scv


class _Tracker:
    """Counts evaluations and keeps the best point seen (earlier wins ties)."""

    def __init__(self, budget: int, target: float | None):
        self.budget = budget
        self.target = target
        self.evals = 0
        self.best_x = None
        self.best_f = math.inf
        self.history = []

    @property
    def remaining(self) -> int:
        return self.budget - self.evals

    @property
    def done(self) -> bool:
        return self.remaining <= 0 or (self.target is not None and self.best_f <= self.target)

    def record(self, xs, fs):
        for x, f in zip(xs, fs):
            self.evals += 1
            if f < self.best_f:
                self.best_f = float(f)
                self.best_x = np.array(x, dtype=float)
                self.history.append((self.evals, self.best_f))


def _one_plus_one(fun, x0, sigma0, budget, rng, tracker, evaluate):
    x = np.array(x0, dtype=float)
    fx = evaluate(fun, [x])[0]
    tracker.record([x], [fx])
    sigma = sigma0
    used, successes, window = 1, 0, 0
    while used < budget and not tracker.done:
        y = x + sigma * rng.standard_normal(len(x))
        fy = evaluate(fun, [y])[0]
        tracker.record([y], [fy])
        used += 1
        window += 1
        if fy < fx:
            x, fx = y, fy
            successes += 1
        if window == SUCCESS_WINDOW:
            rate = successes / SUCCESS_WINDOW
            if rate > 0.2:
                sigma *= STEP_UP
            elif rate < 0.2:
                sigma *= STEP_DOWN
            successes = window = 0
        if sigma < MIN_STEP:
            break


def _cma_es(fun, x0, sigma0, budget, rng, tracker, evaluate, popsize=None):
    dim = len(x0)
    lam = popsize or 4 + int(3 * math.log(dim))
    mu = lam // 2
    weights = math.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
    weights /= weights.sum()
    mueff = 1.0 / np.sum(weights ** 2)

    cc = (4 + mueff / dim) / (dim + 4 + 2 * mueff / dim)
    cs = (mueff + 2) / (dim + mueff + 5)
    c1 = 2 / ((dim + 1.3) ** 2 + mueff)
    cmu = min(1 - c1, 2 * (mueff - 2 + 1 / mueff) / ((dim + 2) ** 2 + mueff))
    damps = 1 + 2 * max(0.0, math.sqrt((mueff - 1) / (dim + 1)) - 1) + cs
    chi_n = math.sqrt(dim) * (1 - 1 / (4 * dim) + 1 / (21 * dim ** 2))

    mean = np.array(x0, dtype=float)
    sigma = sigma0
    C = np.eye(dim)
    pc = np.zeros(dim)
    ps = np.zeros(dim)
    used = 0
    gen = 0
    while used + lam <= budget and not tracker.done:
        C = np.triu(C) + np.triu(C, 1).T
        D2, Bm = np.linalg.eigh(C)
        D2 = np.maximum(D2, 1e-300)
        if D2.max() / D2.min() > MAX_CONDITION:
            break
        D = np.sqrt(D2)
        z = rng.standard_normal((lam, dim))
        y = (z * D) @ Bm.T
        xs = mean + sigma * y
        fs = np.asarray(evaluate(fun, xs), dtype=float)
        tracker.record(xs, fs)
        used += lam
        gen += 1

        order = np.argsort(fs, kind="stable")[:mu]
        y_sel = y[order]
        y_w = weights @ y_sel
        mean = mean + sigma * y_w

        inv_sqrt_C_yw = Bm @ ((Bm.T @ y_w) / D)
        ps = (1 - cs) * ps + math.sqrt(cs * (2 - cs) * mueff) * inv_sqrt_C_yw
        ps_norm = np.linalg.norm(ps)
        hsig = ps_norm / math.sqrt(1 - (1 - cs) ** (2 * gen)) / chi_n < 1.4 + 2 / (dim + 1)
        pc = (1 - cc) * pc + hsig * math.sqrt(cc * (2 - cc) * mueff) * y_w

        rank_mu = (y_sel.T * weights) @ y_sel
        C = ((1 - c1 - cmu) * C
             + c1 * (np.outer(pc, pc) + (1 - hsig) * cc * (2 - cc) * C)
             + cmu * rank_mu)
        sigma *= math.exp((cs / damps) * (ps_norm / chi_n - 1))
        if sigma * math.sqrt(D2.max()) < MIN_STEP:
            break


def _sequential(fun, xs):
    return [fun(x) for x in xs]


def minimize(fun: Callable, init: Callable, cfg: OptConfig, tracker: _Tracker | None = None) -> _Tracker:
    """Run ``cfg.strategy`` with ``cfg.restarts`` restarts on ``fun``.

    ``init(rng, r)`` returns the start point of run ``r``.  Run ``r`` draws from a
    generator seeded with ``(cfg.seed, r)``.  The budget is split evenly over
    the runs that are still to come, so unused evaluations carry forward.
    """
    if tracker is None:
        tracker = _Tracker(cfg.max_evals, cfg.target_scv)
    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    if pool is None:
        evaluate = _sequential
    else:
        def evaluate(f, xs):
            return list(pool.map(f, list(xs)))
    try:
        runs = cfg.restarts + 1
        for r in range(runs):
            if tracker.done:
                break
            rng = np.random.default_rng([cfg.seed & 0xFFFFFFFFFFFFFFFF, r])
            budget = tracker.remaining // (runs - r)
            x0 = init(rng, r)
            if cfg.strategy is Strategy.ONE_PLUS_ONE_ES:
                _one_plus_one(fun, x0, cfg.sigma0, budget, rng, tracker, evaluate)
            else:
                # a generation must fit in the run's share; otherwise use what is left
                if budget < (cfg.popsize or 4 + int(3 * math.log(len(x0)))):
                    budget = tracker.remaining
                _cma_es(fun, x0, cfg.sigma0, budget, rng, tracker, evaluate, cfg.popsize)
    finally:
        if pool is not None:
            pool.shutdown()
    return tracker


def optimize_full(n: int, cfg: OptConfig = OptConfig()) -> OptResult:
    """Minimize the SCV over all ``n + 1`` parameters."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    omega0 = cfg.omega_init or auto_omega(n)

    def init(rng, r):
        return np.concatenate([[math.log(omega0)], rng.uniform(-math.pi, math.pi, n)])

    tracker = minimize(partial(objective, policy=cfg.policy), init, cfg)
    form = decode(tracker.best_x)
    return OptResult(form, tracker.best_f, tracker.evals, tracker.history, cfg.seed)
