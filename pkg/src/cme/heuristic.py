"""Three-parameter heuristic: equidistant zeros around a single spike.

Within one ``(0, 2 pi)`` cycle the ``n`` cosine-square zeros ``phi_k + pi`` are
spread at a common distance ``d``, except for one gap of width ``w`` that
leaves room for the spike at ``p``.  Only ``(omega, p, w)`` are searched,
whatever the order ``n``:

    d = (2 pi - w)/n,    i = floor((p - w/2)/d + 1/2)
    phi_k + pi = (k - 1/2) d          for k <= i
    phi_k + pi = (k - 1/2) d + w      for k >  i

Since ``i`` is a floor, the SCV is constant in ``p`` while ``i`` stays put.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from .analysis import DegenerateFormError, compute_scv
from .core import CosineSquareForm
from .optimize import PENALTY, OptConfig, OptResult, _Tracker, minimize
from .precision import DEFAULT_POLICY, PrecisionPolicy

__all__ = [
    "HeuristicLayout",
    "default_grid",
    "heuristic_objective",
    "layout_phis",
    "optimize_heuristic",
]

TWO_PI = 2 * math.pi
GRID_SIZE = 12
OMEGA_RANGE = (0.05, TWO_PI)
WIDTH_RANGE = (0.05, math.pi)


@dataclass(frozen=True)
class HeuristicLayout:
    n: int
    omega: float
    p: float
    w: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not 0 < self.w < TWO_PI:
            raise ValueError(f"spike width w must lie in (0, 2pi), got {self.w}")
        if not self.w / 2 < self.p < TWO_PI - self.w / 2:
            raise ValueError(f"spike location p must lie in (w/2, 2pi - w/2), got {self.p}")

    @property
    def d(self) -> float:
        """Distance between neighbouring zeros."""
        return (TWO_PI - self.w) / self.n

    @property
    def i(self) -> int:
        """Number of zeros before the spike."""
        return math.floor((self.p - self.w / 2) / self.d + 0.5)

    def zeros(self) -> np.ndarray:
        """The ``phi_k + pi`` values, increasing in ``(0, 2 pi)``."""
        k = np.arange(1, self.n + 1)
        z = (k - 0.5) * self.d
        return np.where(k <= self.i, z, z + self.w)

    def form(self) -> CosineSquareForm:
        return CosineSquareForm.from_phis(self.omega, tuple(self.zeros() - math.pi))


def layout_phis(n: int, omega: float, p: float, w: float) -> CosineSquareForm:
    return HeuristicLayout(n, omega, p, w).form()


def heuristic_objective(n: int, omega: float, p: float, w: float,
                        policy: PrecisionPolicy = DEFAULT_POLICY) -> float:
    return compute_scv(layout_phis(n, omega, p, w), policy)


def _decode(x) -> tuple[float, float, float]:
    return math.exp(x[0]), float(x[1]), float(x[2])


def _search_objective(x, n: int, policy: PrecisionPolicy) -> float:
    # unconstrained wrapper: x = (log omega, p, w)
    try:
        omega, p, w = _decode(x)
        return heuristic_objective(n, omega, p, w, policy)
    except (DegenerateFormError, ArithmeticError, ValueError):
        return PENALTY


def default_grid(size: int = GRID_SIZE, omega_range=OMEGA_RANGE, width_range=WIDTH_RANGE):
    """Grid points ``(log omega, p, w)``, in evaluation order.

    ``omega`` is geometric over ``(lo, hi]``, ``w`` linear over ``(lo, hi]``
    and ``p`` at cell centres of ``(w/2, 2 pi - w/2)``.
    """
    omegas = np.geomspace(*omega_range, size + 1)[1:]
    widths = np.linspace(*width_range, size + 1)[1:]
    pts = []
    for omega in omegas:
        for w in widths:
            for j in range(size):
                p = w / 2 + (TWO_PI - w) * (j + 0.5) / size
                pts.append((math.log(omega), p, w))
    return np.array(pts)


def optimize_heuristic(n: int, cfg: OptConfig = OptConfig(max_evals=5000),
                       grid_size: int = GRID_SIZE,
                       omega_range=OMEGA_RANGE, width_range=WIDTH_RANGE) -> OptResult:
    """Grid search over ``(omega, p, w)`` followed by ES refinement.

    The grid counts against ``cfg.max_evals``.  Restart ``r`` of the
    refinement starts from the ``r``-th best grid point.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    fun = partial(_search_objective, n=n, policy=cfg.policy)
    grid = default_grid(grid_size, omega_range, width_range)
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            values = list(pool.map(fun, list(grid), chunksize=16))
    else:
        values = [fun(x) for x in grid]
    tracker = _Tracker(max(cfg.max_evals, len(grid)), cfg.target_scv)
    tracker.record(grid, values)
    ranked = np.argsort(values, kind="stable")

    def init(rng, r):
        return grid[ranked[r % len(ranked)]].copy()

    if not tracker.done:
        minimize(fun, init, cfg, tracker)
    omega, p, w = _decode(tracker.best_x)
    form = layout_phis(n, omega, p, w)
    return OptResult(form, tracker.best_f, tracker.evals, tracker.history, cfg.seed,
                     layout=HeuristicLayout(n, omega, p, w))
