"""Multilevel hierarchical-basis and lifted-wavelet transforms.

Analysis walks from the finest level down to level 1.  On each level the
predict step replaces every new vertex value by its deviation from the mean of
its two parents.  The wavelet family follows this by an update step that adds
a weighted share of each detail back to both parents.  Parent/child update
weights are ``2 w m_child / m_parent`` where ``m`` is the integral of the hat
function on the vertex's own level; ``w = 1/4`` makes every synthesis wavelet
mean-free.

Integer arithmetic uses floor division inside both lifting steps, so
synthesis inverts analysis bit for bit.

Both directions work in place on one buffer.  Vertices are processed in
chunks of at most ``CHUNK`` so temporaries do not grow with the mesh.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DataError, UsageError
from .mesh import Basis, CoefficientVector, MeshHierarchy, level_of

CHUNK = 4096
DEFAULT_WEIGHT = Fraction(1, 4)


class Family(enum.IntEnum):
    HIERARCHICAL = 0
    WAVELET = 1

    @property
    def basis(self) -> Basis:
        return Basis.HIERARCHICAL if self is Family.HIERARCHICAL else Basis.WAVELET


class Arithmetic(enum.IntEnum):
    FLOAT = 0
    INTEGER = 1


@dataclass(frozen=True)
class TransformKind:
    family: Family = Family.HIERARCHICAL
    arithmetic: Arithmetic = Arithmetic.FLOAT
    weight: Fraction = DEFAULT_WEIGHT

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "arithmetic", Arithmetic(self.arithmetic))
        object.__setattr__(self, "weight", Fraction(self.weight))

    def with_arithmetic(self, arithmetic: Arithmetic) -> "TransformKind":
        return TransformKind(self.family, arithmetic, self.weight)


HB = TransformKind(Family.HIERARCHICAL, Arithmetic.FLOAT)
HB_INT = TransformKind(Family.HIERARCHICAL, Arithmetic.INTEGER)
WAVELET = TransformKind(Family.WAVELET, Arithmetic.FLOAT)
WAVELET_INT = TransformKind(Family.WAVELET, Arithmetic.INTEGER)


@dataclass(frozen=True)
class _Level:
    vertices: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    # rational update weights num/den for the first and second parent
    num1: np.ndarray
    num2: np.ndarray
    den1: np.ndarray
    den2: np.ndarray


@lru_cache(maxsize=32)
def _levels(h: MeshHierarchy, weight: Fraction) -> tuple[_Level, ...]:
    t = h.element_counts
    scale = 2**h.dim
    out = [None]
    for l in range(1, h.levels):
        v = h.level_vertices[l]
        p1, p2 = h.parents[v, 0], h.parents[v, 1]
        num = 2 * weight.numerator * t[v]
        out.append(_Level(v, p1, p2, num, num,
                          weight.denominator * scale * t[p1],
                          weight.denominator * scale * t[p2]))
    return tuple(out)


def _chunks(n: int):
    for a in range(0, n, CHUNK):
        yield a, min(a + CHUNK, n)


def _check(h: MeshHierarchy, c: CoefficientVector):
    if len(c.values) != h.size:
        raise UsageError(f"vector of length {len(c.values)} does not match hierarchy of size {h.size}")


def _as_integers(values: np.ndarray) -> np.ndarray:
    if values.dtype.kind in "iu":
        return values.astype(np.int64)
    if not np.all(np.isfinite(values)) or np.any(values != np.round(values)):
        raise DataError("integer transform needs integer-valued input")
    return values.astype(np.int64)


def _buffer(c: CoefficientVector, kind: TransformKind, out):
    if kind.arithmetic is Arithmetic.INTEGER:
        src = _as_integers(c.values)
        dtype = np.int64
    else:
        src = c.values
        dtype = np.float64
    if out is None:
        return np.array(src, dtype=dtype)
    if out.dtype != dtype or out.shape != src.shape:
        raise UsageError(f"output buffer must be {dtype.__name__} of shape {src.shape}")
    if out is not c.values:
        out[...] = src
    return out


def analyze(h: MeshHierarchy, u: CoefficientVector, kind: TransformKind = HB, out=None) -> CoefficientVector:
    """Nodal values to multilevel coefficients.

    Pass ``out=u.values`` to transform in place.
    """
    _check(h, u)
    if u.basis is not Basis.NODAL:
        raise UsageError(f"analysis expects nodal values, got {u.basis.name}")
    x = _buffer(u, kind, out)
    integer = kind.arithmetic is Arithmetic.INTEGER
    wavelet = kind.family is Family.WAVELET
    levels = _levels(h, kind.weight) if wavelet else None
    for l in range(h.refinements, 0, -1):
        v_all = h.level_vertices[l]
        par = h.parents
        for a, b in _chunks(len(v_all)):
            v = v_all[a:b]
            if integer:
                x[v] -= (x[par[v, 0]] + x[par[v, 1]]) >> 1
            else:
                x[v] -= 0.5 * (x[par[v, 0]] + x[par[v, 1]])
        if wavelet:
            _update(x, levels[l], +1, integer)
    return CoefficientVector(x, kind.family.basis)


def synthesize(h: MeshHierarchy, c: CoefficientVector, kind: TransformKind = HB, out=None) -> CoefficientVector:
    """Inverse of :func:`analyze`."""
    _check(h, c)
    if c.basis is not kind.family.basis:
        raise UsageError(f"coefficients are in {c.basis.name} basis, transform is {kind.family.name}")
    x = _buffer(c, kind, out)
    integer = kind.arithmetic is Arithmetic.INTEGER
    wavelet = kind.family is Family.WAVELET
    levels = _levels(h, kind.weight) if wavelet else None
    for l in range(1, h.levels):
        if wavelet:
            _update(x, levels[l], -1, integer)
        v_all = h.level_vertices[l]
        par = h.parents
        for a, b in _chunks(len(v_all)):
            v = v_all[a:b]
            if integer:
                x[v] += (x[par[v, 0]] + x[par[v, 1]]) >> 1
            else:
                x[v] += 0.5 * (x[par[v, 0]] + x[par[v, 1]])
    return CoefficientVector(x, Basis.NODAL)


def _update(x: np.ndarray, lev: _Level, sign: int, integer: bool):
    add = np.add.at if sign > 0 else np.subtract.at
    for a, b in _chunks(len(lev.vertices)):
        d = x[lev.vertices[a:b]]
        if integer:
            add(x, lev.p1[a:b], (lev.num1[a:b] * d) // lev.den1[a:b])
            add(x, lev.p2[a:b], (lev.num2[a:b] * d) // lev.den2[a:b])
        else:
            add(x, lev.p1[a:b], d * (lev.num1[a:b] / lev.den1[a:b]))
            add(x, lev.p2[a:b], d * (lev.num2[a:b] / lev.den2[a:b]))


def level_sizes(h: MeshHierarchy) -> list[int]:
    """Number of coefficients owned by each level."""
    return [len(v) for v in h.level_vertices]


__all__ = [
    "Arithmetic", "Family", "TransformKind", "HB", "HB_INT", "WAVELET", "WAVELET_INT",
    "analyze", "synthesize", "level_of", "level_sizes", "CHUNK",
]
