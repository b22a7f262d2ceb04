"""Synthetic nodal fields used by the CLI ``gen`` command, scripts and tests."""

from __future__ import annotations

import numpy as np

from .errors import UsageError
from .mesh import MeshHierarchy


def _coords(h: MeshHierarchy):
    return [h.vertex_coords[:, a] for a in range(h.dim)]


def constant(h: MeshHierarchy, value: float = 1.0) -> np.ndarray:
    return np.full(h.size, float(value))


def linear(h: MeshHierarchy) -> np.ndarray:
    x = _coords(h)
    return 0.25 + sum((a + 1) * xa for a, xa in enumerate(x))


def sine(h: MeshHierarchy) -> np.ndarray:
    """``sin(12 (x0 - 1/2)(x1 - 1/2))``; in 1D the second factor is dropped."""
    x = _coords(h)
    if h.dim == 1:
        return np.sin(12.0 * (x[0] - 0.5))
    return np.sin(12.0 * (x[0] - 0.5) * (x[1] - 0.5))


def peak(h: MeshHierarchy, center=0.5, width: float = 0.02) -> np.ndarray:
    """Narrow Gaussian bump."""
    r2 = sum((xa - center) ** 2 for xa in _coords(h))
    return np.exp(-r2 / width**2)


def wave(h: MeshHierarchy, t: float = 0.0, speed: float = 0.004, width: float = 0.1,
         start: float = 0.1) -> np.ndarray:
    """Gaussian pulse travelling along ``x0``; ``t`` counts time steps."""
    x = _coords(h)
    r2 = (x[0] - start - speed * t) ** 2
    if h.dim == 2:
        r2 = r2 + (x[1] - 0.5) ** 2
    return np.exp(-r2 / width**2)


def wave_trajectory(h: MeshHierarchy, steps: int, **kw) -> list[np.ndarray]:
    return [wave(h, t, **kw) for t in range(steps)]


FIELDS = {"constant": constant, "linear": linear, "sine": sine, "peak": peak, "wave": wave}


def make_field(name: str, h: MeshHierarchy) -> np.ndarray:
    try:
        return FIELDS[name](h)
    except KeyError:
        raise UsageError(f"unknown field {name!r}; choose from {', '.join(FIELDS)}") from None
