"""Fixed-point storage of dense symmetric preconditioner blocks.

A symmetric matrix is cut into ``s x s`` tiles.  Only tiles on or below the
diagonal are kept; each is quantized with its own value range and ``k`` bits
per entry.  Diagonal tiles quantize their lower triangle and mirror it, so the
reconstruction is exactly symmetric.  Products are accumulated in float64 from
the dequantized tiles, one tile at a time.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .coding.quantize import QuantizerSpec, dequantize_array, quantize_array
from .errors import DataError, UsageError
from .krylov import pcg
from .mesh import assemble_p1

ALLOWED_BITS = (4, 8, 16, 32)
_INDEX_DTYPE = {4: np.uint8, 8: np.uint8, 16: np.uint16, 32: np.uint32}


@dataclass(frozen=True)
class _Tile:
    row: int
    col: int
    spec: QuantizerSpec
    packed: np.ndarray
    shape: tuple[int, int]


@lru_cache(maxsize=None)
def _tril(n: int):
    return np.tril_indices(n)


def _pack(idx: np.ndarray, k: int) -> np.ndarray:
    flat = idx.ravel().astype(_INDEX_DTYPE[k])
    if k != 4:
        return flat
    if flat.size % 2:
        flat = np.append(flat, 0)
    return (flat[0::2] | (flat[1::2] << 4)).astype(np.uint8)


def _unpack(packed: np.ndarray, k: int, n: int) -> np.ndarray:
    if k != 4:
        return packed.astype(np.int64)
    out = np.empty(2 * packed.size, dtype=np.int64)
    out[0::2] = packed & 0x0F
    out[1::2] = packed >> 4
    return out[:n]


@dataclass(frozen=True, eq=False)
class CompressedBlockMatrix:
    n: int
    s: int
    k: int
    tiles: tuple[_Tile, ...] = field(repr=False)

    def _dense_tile(self, t: _Tile) -> np.ndarray:
        rows, cols = t.shape
        if t.row == t.col:
            tri = _tril(rows)
            vals = dequantize_array(t.spec, _unpack(t.packed, self.k, len(tri[0])))
            b = np.empty((rows, cols))
            b[tri] = vals
            b[tri[1], tri[0]] = vals
            return b
        return dequantize_array(t.spec, _unpack(t.packed, self.k, rows * cols)).reshape(rows, cols)

    def reconstruct(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        for t in self.tiles:
            b = self._dense_tile(t)
            r0, c0 = t.row * self.s, t.col * self.s
            out[r0 : r0 + b.shape[0], c0 : c0 + b.shape[1]] = b
            if t.row != t.col:
                out[c0 : c0 + b.shape[1], r0 : r0 + b.shape[0]] = b.T
        return out

    def storage_bytes(self) -> int:
        """Packed indices plus 8-byte ``c_min``/``c_max`` per tile."""
        return sum(t.packed.nbytes + 16 for t in self.tiles)

    def max_errors(self) -> dict[tuple[int, int], float]:
        return {(t.row, t.col): t.spec.max_error for t in self.tiles}


def compress_block_matrix(m: np.ndarray, k: int = 16, s: int = 8) -> CompressedBlockMatrix:
    m = np.asarray(m, dtype=np.float64)
    n = m.shape[0]
    if m.shape != (n, n):
        raise UsageError(f"matrix must be square, got {m.shape}")
    if k not in ALLOWED_BITS:
        raise UsageError(f"bit width must be one of {ALLOWED_BITS}, got {k}")
    if s < 1:
        raise UsageError("tile size must be positive")
    if not np.all(np.isfinite(m)):
        raise DataError("matrix has non-finite entries")
    scale = max(1.0, float(np.abs(m).max(initial=0.0)))
    if np.abs(m - m.T).max(initial=0.0) > 1e-12 * scale:
        raise DataError("matrix is not symmetric")
    nt = -(-n // s)
    tiles = []
    for bi in range(nt):
        for bj in range(bi + 1):
            block = m[bi * s : (bi + 1) * s, bj * s : (bj + 1) * s]
            vals = block[_tril(block.shape[0])] if bi == bj else block.ravel()
            spec = QuantizerSpec(float(vals.min()), float(vals.max()), k)
            tiles.append(_Tile(bi, bj, spec, _pack(quantize_array(spec, vals), k), block.shape))
    return CompressedBlockMatrix(n, s, k, tuple(tiles))


def apply(mc: CompressedBlockMatrix, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != mc.n:
        raise UsageError(f"vector of length {x.shape[0]} does not match matrix of size {mc.n}")
    y = np.zeros(x.shape)
    s = mc.s
    for t in mc.tiles:
        b = mc._dense_tile(t)
        r0, c0 = t.row * s, t.col * s
        y[r0 : r0 + b.shape[0]] += b @ x[c0 : c0 + b.shape[1]]
        if t.row != t.col:
            y[c0 : c0 + b.shape[1]] += b.T @ x[r0 : r0 + b.shape[0]]
    return y


def laplacian_2d(n_grid: int) -> sp.csr_matrix:
    """P1 stiffness matrix on the ``n_grid x n_grid`` interior nodes of a
    uniform triangulation of the unit square with Dirichlet boundary."""
    n = n_grid + 2
    _, a = assemble_p1(2, n)
    j, i = np.meshgrid(np.arange(1, n - 1), np.arange(1, n - 1), indexing="ij")
    interior = (i + j * n).ravel()
    return a[interior][:, interior].tocsr()


@dataclass
class HarnessResult:
    grid: int
    k: int
    s: int
    block: int
    iters_exact: int
    iters_compressed: int
    converged_exact: bool
    converged_compressed: bool
    spd: bool
    storage_bytes: int

    @property
    def increase(self) -> float:
        return self.iters_compressed / self.iters_exact - 1.0

    CSV_COLUMNS = ("grid", "k", "s", "iters_exact", "iters_compressed", "storage_bytes")

    def csv_row(self) -> list:
        return [getattr(self, c) for c in self.CSV_COLUMNS]


def cg_harness(n_grid: int = 64, k: int = 16, block: int | None = None, s: int = 8,
               rtol: float = 1e-8, seed: int = 0) -> HarnessResult:
    """CG iteration counts with exact and with k-bit block-Jacobi preconditioners.

    The Jacobi blocks are ``block`` consecutive unknowns (default one grid
    row); their exact inverses are stored with ``s x s`` fixed-point tiles.
    """
    a = laplacian_2d(n_grid)
    size = a.shape[0]
    block = n_grid if block is None else block
    starts = list(range(0, size, block))
    inverses, compressed = [], []
    spd = True
    for st in starts:
        sub = a[st : st + block, st : st + block].toarray()
        inv = np.linalg.inv(sub)
        inv = 0.5 * (inv + inv.T)
        inverses.append(inv)
        cb = compress_block_matrix(inv, k, s)
        compressed.append(cb)
        try:
            np.linalg.cholesky(cb.reconstruct())
        except np.linalg.LinAlgError:
            spd = False

    def exact(r):
        return np.concatenate([inv @ r[st : st + len(inv)] for st, inv in zip(starts, inverses)])

    def lossy(r):
        return np.concatenate([apply(cb, r[st : st + cb.n]) for st, cb in zip(starts, compressed)])

    b = np.random.default_rng(seed).standard_normal(size)
    maxiter = 10 * n_grid
    _, it_exact, ok_exact = pcg(a.dot, b, exact, rtol=rtol, maxiter=maxiter)
    _, it_lossy, ok_lossy = pcg(a.dot, b, lossy, rtol=rtol, maxiter=maxiter)
    return HarnessResult(n_grid, k, s, block, it_exact, it_lossy, ok_exact, ok_lossy, spd,
                         sum(cb.storage_bytes() for cb in compressed))


def write_csv(path, results):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HarnessResult.CSV_COLUMNS)
        for r in results:
            w.writerow(r.csv_row())
