"""Uniform scalar quantization with midpoint reconstruction."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import QuantizerRangeError, UsageError


@dataclass(frozen=True)
class QuantizerSpec:
    """``2**k`` cells of width ``step`` covering ``[c_min, c_max]``."""

    c_min: float
    c_max: float
    k: int

    def __post_init__(self):
        if not 1 <= self.k <= 32:
            raise UsageError(f"bit width must be in 1..32, got {self.k}")
        if not self.c_min <= self.c_max:
            raise UsageError(f"empty range [{self.c_min}, {self.c_max}]")

    @property
    def step(self) -> float:
        return math.ldexp(self.c_max - self.c_min, -self.k)

    @property
    def levels(self) -> int:
        return 1 << self.k

    @property
    def constant(self) -> bool:
        return self.c_min == self.c_max

    @property
    def max_error(self) -> float:
        return 0.5 * self.step


def quantize(spec: QuantizerSpec, c: float) -> int:
    if not spec.c_min <= c <= spec.c_max:
        raise QuantizerRangeError(f"{c!r} outside [{spec.c_min!r}, {spec.c_max!r}]")
    if spec.constant:
        return 0
    if c == spec.c_max:
        return spec.levels - 1
    return min(int(math.floor((c - spec.c_min) / spec.step)), spec.levels - 1)


def dequantize(spec: QuantizerSpec, index: int) -> float:
    if not 0 <= index < spec.levels:
        raise QuantizerRangeError(f"index {index} outside [0, {spec.levels - 1}]")
    if spec.constant:
        return spec.c_min
    return spec.c_min + spec.step * (index + 0.5)


def quantize_array(spec: QuantizerSpec, c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=np.float64)
    if c.size and (c.min() < spec.c_min or c.max() > spec.c_max):
        raise QuantizerRangeError(f"values outside [{spec.c_min!r}, {spec.c_max!r}]")
    if spec.constant:
        return np.zeros(c.shape, dtype=np.int64)
    idx = np.floor((c - spec.c_min) / spec.step).astype(np.int64)
    np.minimum(idx, spec.levels - 1, out=idx)
    np.maximum(idx, 0, out=idx)
    return idx


def dequantize_array(spec: QuantizerSpec, idx: np.ndarray) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= spec.levels):
        raise QuantizerRangeError(f"indices outside [0, {spec.levels - 1}]")
    if spec.constant:
        return np.full(idx.shape, spec.c_min)
    return spec.c_min + spec.step * (idx + 0.5)


def bits_for_span(span_cells: int) -> int:
    """Smallest ``k >= 1`` with ``2**k >= span_cells``."""
    return max(1, int(span_cells - 1).bit_length())
