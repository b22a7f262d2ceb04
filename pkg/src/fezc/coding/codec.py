"""Transform coding of nodal vectors and the self-describing FEZC container.

Layout (little-endian)::

    "FEZC" | version u8 | dim u8 | refinements u8 | family u8 | arithmetic u8
    | order u8 | target u8 | eps f64 | level count u8
    | per level: c_min f64, c_max f64, k u8, symbol count u32
    | payload length u64 | payload | CRC32(payload) u32

The payload is a single range-coded stream holding the levels in order
0..refinements.  Each level has its own adaptive model over a window of at
most ``MODEL_WINDOW`` indices around the index of zero plus an escape symbol;
escaped indices follow as ``k`` raw bits.  A level with ``c_min == c_max`` is
constant and codes no symbols.
"""

from __future__ import annotations

import enum
import math
import struct
import zlib
from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError, FormatError, ToleranceTooTightError, UsageError
from ..mesh import Basis, CoefficientVector, MeshHierarchy, Norm, all_norms, build_hierarchy
from ..transform import Arithmetic, Family, TransformKind, analyze, synthesize
from .quantize import QuantizerSpec, bits_for_span, dequantize_array, quantize_array
from .rangecoder import AdaptiveModel, RangeDecoder, RangeEncoder
from .schedule import LevelSchedule, make_schedule

MAGIC = b"FEZC"
VERSION = 1
MODEL_WINDOW = 4096
# quantization steps are shrunk by this factor so rounding in the float
# arithmetic around them cannot push an error past its bound
SAFETY = 1.0 - 2.0**-30

_HEAD = struct.Struct("<4sBBBBBBBdB")
_LEVEL = struct.Struct("<ddBI")
_LEN = struct.Struct("<Q")
_CRC = struct.Struct("<I")


class Order(enum.IntEnum):
    TRANSFORM_THEN_QUANTIZE = 0
    QUANTIZE_THEN_TRANSFORM = 1

    @classmethod
    def parse(cls, name: str) -> "Order":
        table = {"tq": cls.TRANSFORM_THEN_QUANTIZE, "qt": cls.QUANTIZE_THEN_TRANSFORM}
        try:
            return table[name.lower()]
        except KeyError:
            raise UsageError(f"unknown order {name!r}") from None


TQ = Order.TRANSFORM_THEN_QUANTIZE
QT = Order.QUANTIZE_THEN_TRANSFORM


@dataclass(frozen=True)
class LevelHeader:
    c_min: float
    c_max: float
    k: int
    count: int


@dataclass(frozen=True)
class Header:
    dim: int
    refinements: int
    family: Family
    arithmetic: Arithmetic
    order: Order
    target: Norm
    eps: float
    levels: tuple[LevelHeader, ...] = field(default=())

    @property
    def kind(self) -> TransformKind:
        return TransformKind(self.family, self.arithmetic)

    @property
    def nbytes(self) -> int:
        return _HEAD.size + _LEVEL.size * len(self.levels) + _LEN.size + _CRC.size


@dataclass(frozen=True)
class CompressedBlob:
    header: Header
    payload: bytes

    def to_bytes(self) -> bytes:
        h = self.header
        parts = [_HEAD.pack(MAGIC, VERSION, h.dim, h.refinements, h.family, h.arithmetic,
                            h.order, h.target, h.eps, len(h.levels))]
        parts += [_LEVEL.pack(lv.c_min, lv.c_max, lv.k, lv.count) for lv in h.levels]
        parts += [_LEN.pack(len(self.payload)), self.payload, _CRC.pack(zlib.crc32(self.payload))]
        return b"".join(parts)

    def __len__(self) -> int:
        return self.header.nbytes + len(self.payload)

    @classmethod
    def from_bytes(cls, data: bytes) -> "CompressedBlob":
        data = bytes(data)
        if len(data) < _HEAD.size:
            raise FormatError("blob shorter than its fixed header", len(data))
        magic, version, dim, refin, fam, arith, order, target, eps, nlev = _HEAD.unpack_from(data, 0)
        if magic != MAGIC:
            raise FormatError(f"bad magic {magic!r}", 0)
        if version != VERSION:
            raise FormatError(f"unsupported version {version}", 4)
        try:
            fam, arith, order, target = Family(fam), Arithmetic(arith), Order(order), Norm(target)
        except ValueError as exc:
            raise FormatError(f"invalid header enum: {exc}", 7) from None
        if dim not in (1, 2):
            raise FormatError(f"invalid dimension {dim}", 5)
        if nlev != refin + 1:
            raise FormatError(f"level count {nlev} does not match {refin} refinements", _HEAD.size - 1)
        pos = _HEAD.size
        levels = []
        for _ in range(nlev):
            if pos + _LEVEL.size > len(data):
                raise FormatError("truncated level table", pos)
            c_min, c_max, k, count = _LEVEL.unpack_from(data, pos)
            if not (1 <= k <= 32 and c_min <= c_max):
                raise FormatError("invalid level quantizer", pos)
            levels.append(LevelHeader(c_min, c_max, k, count))
            pos += _LEVEL.size
        if pos + _LEN.size > len(data):
            raise FormatError("truncated payload length", pos)
        (plen,) = _LEN.unpack_from(data, pos)
        pos += _LEN.size
        if pos + plen + _CRC.size != len(data):
            raise FormatError(f"payload length {plen} inconsistent with blob size {len(data)}", pos - _LEN.size)
        payload = data[pos : pos + plen]
        (crc,) = _CRC.unpack_from(data, pos + plen)
        if crc != zlib.crc32(payload):
            raise FormatError("payload checksum mismatch", pos + plen)
        header = Header(dim, refin, fam, arith, order, target, eps, tuple(levels))
        return cls(header, payload)


def _window(k: int, zero: int) -> tuple[int, int]:
    size = 1 << k
    width = min(size, MODEL_WINDOW)
    lo = min(max(zero - width // 2, 0), size - width)
    return lo, width


def _zero_index(order: Order, lv: LevelHeader) -> int:
    top = (1 << lv.k) - 1
    if order is QT:
        return min(max(int(-lv.c_min), 0), top)
    if lv.c_min > 0:
        return 0
    if lv.c_max < 0:
        return top
    spec = QuantizerSpec(lv.c_min, lv.c_max, lv.k)
    return min(int(math.floor(-lv.c_min / spec.step)), top)


def _encode_level(enc: RangeEncoder, indices: np.ndarray, k: int, zero: int):
    lo, width = _window(k, zero)
    model = AdaptiveModel(width + 1)
    encode_symbol = enc.encode_symbol
    for idx in (indices - lo).tolist():
        if 0 <= idx < width:
            encode_symbol(model, idx)
        else:
            encode_symbol(model, width)
            enc.encode_bits(idx + lo, k)


def _decode_level(dec: RangeDecoder, count: int, k: int, zero: int) -> np.ndarray:
    lo, width = _window(k, zero)
    model = AdaptiveModel(width + 1)
    decode_symbol = dec.decode_symbol
    out = [0] * count
    for i in range(count):
        s = decode_symbol(model)
        out[i] = dec.decode_bits(k) if s == width else s + lo
    return np.array(out, dtype=np.int64)


def _tq_spec(coeffs: np.ndarray, delta: float, align_zero: bool) -> QuantizerSpec:
    lo, hi = float(coeffs.min()), float(coeffs.max())
    if lo == hi:
        return QuantizerSpec(lo, hi, 1)
    step = 2.0 * delta * SAFETY
    if align_zero:
        # cells centred on multiples of the step, so zero reconstructs as zero
        c_lo = (math.floor(lo / step + 0.5) - 0.5) * step
        if c_lo > lo:
            c_lo -= step
        cells = math.floor((hi - c_lo) / step) + 1
        k = bits_for_span(cells)
        if k > 32:
            raise ToleranceTooTightError(f"level needs {k} > 32 bits at tolerance {delta:g}")
        c_hi = c_lo + math.ldexp(step, k)
        spec = QuantizerSpec(c_lo, c_hi, k)
        if spec.step > 2.0 * delta or c_hi < hi:
            raise ToleranceTooTightError(f"tolerance {delta:g} below floating-point resolution of the level range")
        return spec
    k = max(1, math.ceil(math.log2((hi - lo) / step)))
    if k > 32:
        raise ToleranceTooTightError(f"level needs {k} > 32 bits at tolerance {delta:g}")
    return QuantizerSpec(lo, hi, k)


def qt_step(eps: float) -> float:
    return 2.0 * eps * SAFETY


def _coerce_kind(kind, order: Order) -> TransformKind:
    arith = Arithmetic.INTEGER if order is QT else Arithmetic.FLOAT
    if isinstance(kind, TransformKind):
        if kind.arithmetic is not arith:
            raise UsageError(f"{order.name} requires {arith.name} arithmetic")
        if kind.weight != TransformKind().weight:
            raise UsageError("the container only records the default lifting weight")
        return kind
    return TransformKind(Family(kind), arith)


def compress(h: MeshHierarchy, u, kind=Family.HIERARCHICAL, order: Order = TQ,
             sched: LevelSchedule | None = None, eps: float | None = None,
             target: Norm = Norm.LINF, align_zero: bool = True) -> CompressedBlob:
    """Lossy-compress a nodal vector.

    Either pass a ready ``sched`` or ``eps`` (and ``target``) to build one.
    Quantize-then-transform ignores the per-level tolerances: it rounds the
    nodal values to a grid of step ``2 eps``, which bounds the pointwise error
    (and, on the unit domain, every other norm) by ``eps``.
    """
    order = Order(order)
    kind = _coerce_kind(kind, order)
    if sched is None:
        if eps is None:
            raise UsageError("either a schedule or eps is required")
        sched = make_schedule(h, target, eps)
    if sched.levels != h.levels:
        raise UsageError(f"schedule has {sched.levels} levels, hierarchy {h.levels}")
    if isinstance(u, CoefficientVector):
        if u.basis is not Basis.NODAL:
            raise UsageError("compress expects nodal values")
        u = u.values
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (h.size,):
        raise UsageError(f"vector of length {u.size} does not match hierarchy of size {h.size}")
    if not np.all(np.isfinite(u)):
        raise DataError("input contains non-finite values")

    if order is QT:
        step = qt_step(sched.eps)
        scaled = u / step
        if np.abs(scaled).max(initial=0.0) >= 2.0**52:
            raise ToleranceTooTightError(f"tolerance {sched.eps:g} too small for value range")
        x = analyze(h, CoefficientVector(np.rint(scaled).astype(np.int64)), kind).values
    else:
        x = analyze(h, CoefficientVector(u), kind).values

    enc = RangeEncoder()
    levels = []
    for l, verts in enumerate(h.level_vertices):
        coeffs = x[verts]
        if order is QT:
            lo, hi = int(coeffs.min()), int(coeffs.max())
            k = bits_for_span(hi - lo + 1)
            if k > 32:
                raise ToleranceTooTightError(f"level {l} needs {k} > 32 bits")
            lv = LevelHeader(float(lo), float(hi), k, len(verts))
            indices = coeffs - lo
        else:
            spec = _tq_spec(coeffs, sched.deltas[l], align_zero)
            lv = LevelHeader(spec.c_min, spec.c_max, spec.k, len(verts))
            indices = None if spec.constant else quantize_array(spec, coeffs)
        if lv.c_min != lv.c_max:
            _encode_level(enc, indices, lv.k, _zero_index(order, lv))
        levels.append(lv)
    header = Header(h.dim, h.refinements, kind.family, kind.arithmetic, order, sched.target,
                    float(sched.eps), tuple(levels))
    return CompressedBlob(header, enc.finish())


def decompress(blob, h: MeshHierarchy | None = None) -> CoefficientVector:
    if not isinstance(blob, CompressedBlob):
        blob = CompressedBlob.from_bytes(blob)
    hd = blob.header
    if h is None:
        h = build_hierarchy(hd.dim, hd.refinements)
    elif h.descriptor() != (hd.dim, hd.refinements):
        raise UsageError(f"blob is for hierarchy {(hd.dim, hd.refinements)}, got {h.descriptor()}")
    for lv, verts in zip(hd.levels, h.level_vertices):
        if lv.count != len(verts):
            raise FormatError(f"level symbol count {lv.count} does not match hierarchy")
    integer = hd.order is QT
    x = np.zeros(h.size, dtype=np.int64 if integer else np.float64)
    dec = None
    for lv, verts in zip(hd.levels, h.level_vertices):
        if lv.c_min == lv.c_max:
            x[verts] = int(lv.c_min) if integer else lv.c_min
            continue
        if dec is None:
            dec = RangeDecoder(blob.payload, offset=hd.nbytes - _CRC.size)
        idx = _decode_level(dec, lv.count, lv.k, _zero_index(hd.order, lv))
        if integer:
            x[verts] = idx + int(lv.c_min)
        else:
            x[verts] = dequantize_array(QuantizerSpec(lv.c_min, lv.c_max, lv.k), idx)
    c = synthesize(h, CoefficientVector(x, hd.family.basis), hd.kind).values
    if integer:
        return CoefficientVector(c * qt_step(hd.eps), Basis.NODAL)
    return CoefficientVector(c, Basis.NODAL)


@dataclass(frozen=True)
class RDRow:
    eps: float
    bits_per_value: float
    factor: float
    linf: float
    l2: float
    hm1: float
    nbytes: int

    CSV_COLUMNS = ("eps", "bits_per_value", "factor", "linf", "l2", "hm1")

    def csv_row(self) -> list[str]:
        return [repr(float(getattr(self, c))) for c in self.CSV_COLUMNS]


def measure(h: MeshHierarchy, u, blob) -> RDRow:
    u = u.values if isinstance(u, CoefficientVector) else np.asarray(u, dtype=np.float64)
    back = decompress(blob, h).values
    errs = all_norms(h.norm_operator, u - back)
    nbytes = len(blob)
    bpv = 8.0 * nbytes / h.size
    eps = blob.header.eps if isinstance(blob, CompressedBlob) else float("nan")
    return RDRow(eps, bpv, 64.0 / bpv, errs["linf"], errs["l2"], errs["hminus1"], nbytes)


def rd_sweep(h: MeshHierarchy, u, kind=Family.HIERARCHICAL, order: Order = TQ,
             target: Norm = Norm.LINF, eps_list=()) -> list[RDRow]:
    """Rate and measured distortion for each tolerance in ``eps_list``."""
    eps_list = [float(e) for e in eps_list]
    if not eps_list:
        raise UsageError("empty tolerance list")
    if any(e <= 0 for e in eps_list):
        raise UsageError("tolerances must be positive")
    rows = []
    for eps in eps_list:
        blob = compress(h, u, kind, order, make_schedule(h, target, eps))
        rows.append(measure(h, u, blob))
    return rows
