"""Per-level quantization tolerances for a global error target."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import UsageError
from ..mesh import MeshHierarchy, Norm


@dataclass(frozen=True)
class LevelSchedule:
    target: Norm
    eps: float
    deltas: tuple[float, ...]

    def __post_init__(self):
        if not self.eps > 0:
            raise UsageError(f"tolerance must be positive, got {self.eps}")
        if any(not d > 0 for d in self.deltas):
            raise UsageError("level tolerances must be positive")

    @property
    def levels(self) -> int:
        return len(self.deltas)


def predicted_level_errors(h: MeshHierarchy, target: Norm, deltas) -> np.ndarray:
    """Heuristic size of the error each level contributes in the target norm.

    A level-``l`` error of pointwise size ``delta_l`` spread over its ``N_l``
    vertices is taken as ``delta_l * 2**(-l (d/2 - s)) * sqrt(N_l)``.
    """
    s = Norm(target).sobolev_index
    d = h.dim
    l = np.arange(h.levels)
    n_l = np.array([len(v) for v in h.level_vertices], dtype=float)
    return np.asarray(deltas, dtype=float) * 2.0 ** (-l * (d / 2 - s)) * np.sqrt(n_l)


def make_schedule(h: MeshHierarchy, target: Norm | str, eps: float, split: str = "uniform") -> LevelSchedule:
    """Choose ``delta_l`` so that the reconstruction error meets ``eps``.

    For the L-infinity target the budget is split so that ``sum(delta_l) == eps``;
    ``split="geometric"`` doubles the share from one level to the next finer
    one instead of sharing it evenly.  For L2 and H^-1 the tolerances grow by
    ``2**(-s)`` per level (``s`` = Sobolev index) and are scaled so the
    predicted per-level errors add up to ``eps``.
    """
    target = Norm.parse(target) if isinstance(target, str) else Norm(target)
    if not eps > 0:
        raise UsageError(f"tolerance must be positive, got {eps}")
    top = h.refinements
    if target is Norm.LINF:
        if split == "uniform":
            weights = np.ones(h.levels)
        elif split == "geometric":
            weights = 2.0 ** np.arange(h.levels)
        else:
            raise UsageError(f"unknown split {split!r}")
        deltas = eps * weights / weights.sum()
    else:
        s = target.sobolev_index
        shape = 2.0 ** (s * (top - np.arange(h.levels)))
        beta = eps / predicted_level_errors(h, target, shape).sum()
        deltas = beta * shape
    return LevelSchedule(target, float(eps), tuple(float(x) for x in deltas))
