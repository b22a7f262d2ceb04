"""Uncompressed nodal vectors on disk.

Layout (little-endian)::

    "FEZR" | dim u8 | refinements u8 | count u32 | count x f64
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import FormatError

MAGIC = b"FEZR"
_HEAD = struct.Struct("<4sBBI")


def encode_raw(dim: int, refinements: int, values) -> bytes:
    values = np.ascontiguousarray(values, dtype="<f8")
    return _HEAD.pack(MAGIC, dim, refinements, values.size) + values.tobytes()


def decode_raw(data: bytes) -> tuple[int, int, np.ndarray]:
    if len(data) < _HEAD.size:
        raise FormatError("raw vector file shorter than its header", len(data))
    magic, dim, refinements, count = _HEAD.unpack_from(data, 0)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}", 0)
    if dim not in (1, 2):
        raise FormatError(f"unsupported dimension {dim}", 4)
    expected = (2**refinements + 1) ** dim
    if count != expected:
        raise FormatError(f"count {count} does not match {expected} vertices of the hierarchy", 6)
    if len(data) != _HEAD.size + 8 * count:
        raise FormatError(f"body holds {len(data) - _HEAD.size} bytes, expected {8 * count}",
                          _HEAD.size)
    return dim, refinements, np.frombuffer(data, dtype="<f8", offset=_HEAD.size).astype(np.float64)


def write_raw(path, dim: int, refinements: int, values):
    with open(path, "wb") as fh:
        fh.write(encode_raw(dim, refinements, values))


def read_raw(path) -> tuple[int, int, np.ndarray]:
    with open(path, "rb") as fh:
        return decode_raw(fh.read())
