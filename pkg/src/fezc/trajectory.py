"""Backward-readable storage of time trajectories.

The final state is stored first, followed by the differences
``u[t] - r[t+1]`` for ``t = T-1, ..., 0``, where ``r[t+1]`` is the value the
reader will have reconstructed for the successor step.  Referencing the
reconstruction rather than the original keeps each step's error within its own
tolerance no matter how long the trajectory is.

File layout (little-endian)::

    "FEZT" | version u8 | predictor u8 | step count u32 | offsets u64[count]
    | concatenated FEZC blobs
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .coding.codec import QT, CompressedBlob, Order, compress, decompress
from .coding.schedule import make_schedule
from .errors import FormatError, UsageError
from .mesh import CoefficientVector, MeshHierarchy, Norm, build_hierarchy
from .transform import Family

MAGIC = b"FEZT"
VERSION = 1
_HEAD = struct.Struct("<4sBBI")


class Predictor(enum.IntEnum):
    NONE = 0
    DELTA = 1

    @classmethod
    def parse(cls, name) -> "Predictor":
        if isinstance(name, Predictor):
            return name
        key = str(name).lower()
        if key == "linear":
            raise UsageError("linear prediction in time is not supported; use 'delta' or 'none'")
        try:
            return {"none": cls.NONE, "delta": cls.DELTA}[key]
        except KeyError:
            raise UsageError(f"unknown predictor {name!r}") from None


@dataclass
class TrajectoryStore:
    dim: int
    refinements: int
    predictor: Predictor
    blobs: list[bytes] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.blobs)

    @property
    def tolerances(self) -> list[float]:
        """Per-step tolerances in time order ``t = 0..T``, read from the blob headers."""
        return [CompressedBlob.from_bytes(b).header.eps for b in reversed(self.blobs)]

    @property
    def nbytes(self) -> int:
        return _HEAD.size + 8 * len(self.blobs) + sum(len(b) for b in self.blobs)

    def compression_factor(self) -> float:
        n = (2**self.refinements + 1) ** self.dim
        return 8.0 * n * self.steps / self.nbytes

    def to_bytes(self) -> bytes:
        offsets = []
        pos = _HEAD.size + 8 * len(self.blobs)
        for b in self.blobs:
            offsets.append(pos)
            pos += len(b)
        head = _HEAD.pack(MAGIC, VERSION, self.predictor, len(self.blobs))
        return head + struct.pack(f"<{len(offsets)}Q", *offsets) + b"".join(self.blobs)

    @classmethod
    def from_bytes(cls, data: bytes) -> "TrajectoryStore":
        if len(data) < _HEAD.size:
            raise FormatError("trajectory file shorter than its header", len(data))
        magic, version, predictor, count = _HEAD.unpack_from(data, 0)
        if magic != MAGIC:
            raise FormatError(f"bad magic {magic!r}", 0)
        if version != VERSION:
            raise FormatError(f"unsupported version {version}", 4)
        try:
            predictor = Predictor(predictor)
        except ValueError:
            raise FormatError(f"unknown predictor {predictor}", 5) from None
        table_end = _HEAD.size + 8 * count
        if count == 0 or table_end > len(data):
            raise FormatError("truncated offset table", _HEAD.size)
        offsets = list(struct.unpack_from(f"<{count}Q", data, _HEAD.size)) + [len(data)]
        if offsets[0] != table_end or any(b < a for a, b in zip(offsets, offsets[1:])):
            raise FormatError("inconsistent step offsets", _HEAD.size)
        blobs = [bytes(data[a:b]) for a, b in zip(offsets, offsets[1:])]
        first = CompressedBlob.from_bytes(blobs[0]).header
        return cls(first.dim, first.refinements, predictor, blobs)


def store(h: MeshHierarchy, states: Iterable, eps, predictor="delta",
          family: Family = Family.HIERARCHICAL, order: Order = QT,
          target: Norm = Norm.LINF) -> TrajectoryStore:
    """Compress states given in forward time order ``t = 0..T``.

    ``eps`` is a single tolerance or one per time step.
    """
    predictor = Predictor.parse(predictor)
    states = [np.asarray(s.values if isinstance(s, CoefficientVector) else s, dtype=np.float64)
              for s in states]
    if not states:
        raise UsageError("empty trajectory")
    for t, s in enumerate(states):
        if s.shape != (h.size,):
            raise UsageError(f"state {t} has length {s.size}, hierarchy has {h.size} vertices")
    tols = np.broadcast_to(np.asarray(eps, dtype=float), (len(states),))
    if np.any(tols <= 0):
        raise UsageError("tolerances must be positive")

    def pack(u, t):
        return compress(h, u, family, order, make_schedule(h, target, float(tols[t])))

    last = len(states) - 1
    blob = pack(states[last], last)
    blobs = [blob.to_bytes()]
    recon = decompress(blob, h).values if predictor is Predictor.DELTA else None
    for t in range(last - 1, -1, -1):
        if predictor is Predictor.DELTA:
            blob = pack(states[t] - recon, t)
            recon = recon + decompress(blob, h).values
        else:
            blob = pack(states[t], t)
        blobs.append(blob.to_bytes())
    return TrajectoryStore(h.dim, h.refinements, predictor, blobs)


class BackwardReader:
    """Iterates states from the last time step to the first.

    ``held`` counts the decoded vectors the reader has alive at any moment and
    ``high_water`` records its maximum.
    """

    def __init__(self, s: TrajectoryStore, h: MeshHierarchy | None = None):
        self.store = s
        self.h = build_hierarchy(s.dim, s.refinements) if h is None else h
        self.held = 0
        self.high_water = 0

    def _hold(self, n: int):
        self.held = n
        self.high_water = max(self.high_water, n)

    def _decode(self, i: int) -> np.ndarray:
        t = self.store.steps - 1 - i
        try:
            return decompress(self.store.blobs[i], self.h).values
        except FormatError as exc:
            raise FormatError(f"time step {t}: {exc}") from exc

    def __iter__(self) -> Iterator[np.ndarray]:
        current = self._decode(0)
        self._hold(1)
        yield current.copy()
        for i in range(1, self.store.steps):
            if self.store.predictor is Predictor.DELTA:
                diff = self._decode(i)
                self._hold(2)
                current += diff
                del diff
            else:
                current = self._decode(i)
            self._hold(1)
            yield current.copy()
        self._hold(0)


def read_backwards(s: TrajectoryStore, h: MeshHierarchy | None = None) -> Iterator[np.ndarray]:
    """States ``u[T], u[T-1], ..., u[0]``."""
    return iter(BackwardReader(s, h))
