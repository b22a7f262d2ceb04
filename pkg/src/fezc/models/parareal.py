"""Runtime model for parareal-type iterations with compressed communication.

The iteration error after ``j`` steps is bounded by
``c0 * rate**j * ((1 + dc) / (1 - dc / rho))**(N + 2)``; the number of
iterations ``J`` is the first ``j`` at which the bound drops below ``TOL``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..errors import DomainError, NumericError, UsageError

MAX_ITERATIONS = 10_000


@dataclass(frozen=True)
class ParallelScenario:
    N: int            # subintervals
    rho: float        # local contraction rate of the approximate solver
    t_G: float        # sequential part of one solver application [s]
    t_F: float        # parallel part [s]
    t_C0: float       # uncompressed communication time [s]
    c: float          # t_C = -c log(dc) [s]
    TOL: float
    c0: float = 1.0
    rate: float = 0.1
    dc: float = 0.0
    t_floor: float = 1e-4
    T_seq: float | None = None   # default: N * t_F

    def __post_init__(self):
        if self.N < 1:
            raise UsageError("N must be at least 1")
        for name in ("t_G", "t_F", "t_C0", "c", "t_floor"):
            if not getattr(self, name) >= 0:
                raise UsageError(f"{name} must be nonnegative")
        if not 0 < self.rate < 1:
            raise UsageError(f"contraction rate must lie in (0, 1), got {self.rate}")
        if not (self.TOL > 0 and self.c0 > 0 and self.rho > 0):
            raise UsageError("TOL, c0 and rho must be positive")
        if not 0 <= self.dc < self.rho:
            raise DomainError(f"need 0 <= dc < rho, got dc = {self.dc}, rho = {self.rho}")

    def with_dc(self, dc: float) -> "ParallelScenario":
        return replace(self, dc=float(dc))

    @property
    def sequential_time(self) -> float:
        return self.N * self.t_F if self.T_seq is None else self.T_seq


def parareal_error_factor(dc: float, rho: float, n: int) -> float:
    if not dc < rho:
        raise DomainError(f"compression error {dc} must be below the contraction rate {rho}")
    if dc < 0:
        raise DomainError("compression error must be nonnegative")
    return ((1.0 + dc) / (1.0 - dc / rho)) ** (n + 2)


def parareal_iterations(s: ParallelScenario) -> int:
    factor = parareal_error_factor(s.dc, s.rho, s.N)

    def ok(j):
        return s.c0 * s.rate**j * factor <= s.TOL

    # start from the logarithmic estimate and correct it against the exact test
    est = math.log(s.TOL / (s.c0 * factor)) / math.log(s.rate)
    j = min(max(0, math.ceil(est)), MAX_ITERATIONS)
    while j > 0 and ok(j - 1):
        j -= 1
    while not ok(j):
        j += 1
        if j > MAX_ITERATIONS:
            raise NumericError(f"no convergence within {MAX_ITERATIONS} iterations")
    return j


def communication_time(s: ParallelScenario) -> float:
    if s.dc == 0:
        return s.t_C0
    return min(s.t_C0, max(s.t_floor, -s.c * math.log(s.dc)))


def parareal_runtime(s: ParallelScenario) -> float:
    return s.N * (s.t_G + communication_time(s)) + parareal_iterations(s) * (s.t_G + s.t_F)


def efficiency(s: ParallelScenario) -> float:
    return s.sequential_time / (s.N * parareal_runtime(s))


def default_grid(s: ParallelScenario, points: int = 400) -> np.ndarray:
    """Logarithmic grid in ``(0, rho)``."""
    return s.rho * np.logspace(-12, 0, points, endpoint=False)


@dataclass(frozen=True)
class ParallelPlan:
    dc: float
    J: int
    T_par: float
    E: float
    J_uncompressed: int
    T_uncompressed: float

    @property
    def improvement(self) -> float:
        return 1.0 - self.T_par / self.T_uncompressed


def optimize_compression(s: ParallelScenario, grid=None) -> ParallelPlan:
    """Grid minimizer of ``T_par`` over ``dc``; ties go to the smaller ``dc``."""
    grid = default_grid(s) if grid is None else np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise UsageError("empty compression-error grid")
    if np.any(grid <= 0) or np.any(grid >= s.rho):
        raise DomainError(f"grid must lie inside (0, rho = {s.rho})")
    best_dc, best_t = None, math.inf
    for dc in np.sort(grid):
        t = parareal_runtime(s.with_dc(dc))
        if t < best_t:
            best_dc, best_t = float(dc), t
    base = s.with_dc(0.0)
    if best_t > parareal_runtime(base):
        best_dc = 0.0   # compression never pays off: fall back to raw transfer
    best = s.with_dc(best_dc)
    best_t = parareal_runtime(best)
    return ParallelPlan(best_dc, parareal_iterations(best), best_t, efficiency(best),
                        parareal_iterations(base), parareal_runtime(base))
