"""Runtime model for equidistant checkpoints under random node failures.

With ``q = p_RS * N`` expected failures per unit time, the total time ``T``
solves ``T = T_C + n T_CP + (T / (2n) + T_R) q T``.  Its smaller root is
evaluated as ``2 (T_C + n T_CP) / (b + sqrt(b**2 - x))`` with
``x = 2 q (T_C + n T_CP) / n``, which is the same quantity as
``n (b - sqrt(b**2 - x)) / q`` without the cancellation for small ``x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ..errors import InfeasibleError, UsageError


@dataclass(frozen=True)
class CheckpointScenario:
    N: float
    p_RS: float
    T_C: float
    T_CP: float
    T_DS: float = 0.0

    def __post_init__(self):
        for name in ("N", "p_RS", "T_C", "T_CP", "T_DS"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise UsageError(f"{name} must be finite and nonnegative, got {v}")
        if self.N <= 0:
            raise UsageError("N must be positive")

    @property
    def T_R(self) -> float:
        return self.T_CP + self.T_DS

    @property
    def q(self) -> float:
        return self.p_RS * self.N

    @property
    def b(self) -> float:
        return 1.0 - self.T_R * self.q

    @classmethod
    def from_restart_time(cls, N, p_RS, T_C, T_CP, T_R) -> "CheckpointScenario":
        return cls(N, p_RS, T_C, T_CP, T_R - T_CP)


def _check_b(s: CheckpointScenario):
    if not s.b > 0:
        raise InfeasibleError(f"b = 1 - T_R*p_RS*N = {s.b:.6g} must be positive")


def solvable(s: CheckpointScenario, n) -> bool:
    n = np.asarray(n, dtype=float)
    return bool(np.all((s.b > 0) & (s.b**2 >= 2.0 / n * s.q * (s.T_C + n * s.T_CP))))


def checkpoint_runtime(s: CheckpointScenario, n):
    """Expected total runtime ``T(n)``; ``n`` may be an array."""
    nn = np.asarray(n, dtype=float)
    if np.any(nn < 1):
        raise UsageError("number of checkpoints must be at least 1")
    _check_b(s)
    work = s.T_C + nn * s.T_CP
    x = 2.0 / nn * s.q * work
    disc = s.b**2 - x
    if np.any(disc < 0):
        i = np.flatnonzero(np.atleast_1d(disc) < 0)[0]
        raise InfeasibleError(
            f"b^2 >= (2/n) p_RS N (T_C + n T_CP) violated at n = {np.atleast_1d(nn)[i]:g}: "
            f"{s.b**2:.6g} < {np.atleast_1d(x)[i]:.6g}")
    t = 2.0 * work / (s.b + np.sqrt(disc))
    return float(t) if nn.ndim == 0 else t


def runtime_literal(s: CheckpointScenario, n: float) -> float:
    """``T(n)`` in the direct closed form, for cross-checking."""
    return n * (s.b - math.sqrt(s.b**2 - 2.0 / n * s.q * (s.T_C + n * s.T_CP))) / s.q


def runtime_components(s: CheckpointScenario, n: float) -> dict[str, float]:
    """Split ``T(n)`` into ``T_C + n T_CP + T_RS N_RS``."""
    t = checkpoint_runtime(s, n)
    t_rs = t / (2.0 * n) + s.T_R
    n_rs = s.q * t
    return {"T": t, "T_C": s.T_C, "checkpointing": n * s.T_CP, "T_RS": t_rs, "N_RS": n_rs,
            "restarts": t_rs * n_rs}


def runtime_implicit(s: CheckpointScenario, n: float) -> float:
    """Smaller root of ``T = T_C + n T_CP + (T/(2n) + T_R) q T``, found by bracketing."""
    _check_b(s)
    lo = s.T_C + n * s.T_CP
    if s.q == 0:
        return lo

    def g(t):
        return s.T_C + n * s.T_CP + (t / (2.0 * n) + s.T_R) * s.q * t - t

    hi = n * s.b / s.q   # vertex of the quadratic
    if g(hi) > 0:
        raise InfeasibleError(f"implicit runtime equation has no real solution at n = {n:g}")
    return brentq(g, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


@dataclass(frozen=True)
class CheckpointPlan:
    n_real: float
    n: int
    T: float


def checkpoint_nopt(s: CheckpointScenario) -> CheckpointPlan:
    """Optimal checkpoint count, real-valued and as the better integer neighbour."""
    _check_b(s)
    a = 2.0 * s.q * s.T_CP
    den = 2.0 * s.T_CP * (s.b**2 - a)
    if not den > 0:
        raise InfeasibleError(
            f"b^2 > 2 N p_RS T_CP violated: {s.b**2:.6g} <= {a:.6g}")
    n_real = s.T_C * (a + s.b * math.sqrt(a)) / den
    cands = sorted({max(1, math.floor(n_real)), max(1, math.ceil(n_real))})
    cands = [c for c in cands if solvable(s, c)]
    if not cands:
        raise InfeasibleError(
            f"b^2 >= (2/n) p_RS N (T_C + n T_CP) violated at n = {n_real:g}")
    times = [checkpoint_runtime(s, c) for c in cands]
    best = int(np.argmin(times))
    return CheckpointPlan(n_real, cands[best], times[best])


def brute_force_nopt(s: CheckpointScenario, n_max: int = 10_000) -> int:
    """Integer argmin of ``T`` over the solvable ``n`` in ``1..n_max``."""
    _check_b(s)
    n = np.arange(1, n_max + 1, dtype=float)
    ok = s.b**2 >= 2.0 / n * s.q * (s.T_C + n * s.T_CP)
    if not ok.any():
        raise InfeasibleError("no solvable checkpoint count in range")
    t = checkpoint_runtime(s, n[ok])
    return int(n[ok][np.argmin(t)])
