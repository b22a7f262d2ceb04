"""Nested uniform mesh hierarchies and discrete norms of P1 functions.

Vertices are numbered lexicographically on the finest grid (x fastest), so a
vector of nodal values can be reshaped to ``(n, n)`` in 2D.  Every vertex of
level ``l >= 1`` is the midpoint of an edge of the level ``l - 1`` mesh; the
two endpoints of that edge are its parents.  Squares are split along the
diagonal from their lower-left to their upper-right corner on every level.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import CapacityError, NumericError, UsageError
from .krylov import pcg

MAX_REFINEMENTS = {1: 14, 2: 10}


class Basis(enum.IntEnum):
    NODAL = 0
    HIERARCHICAL = 1
    WAVELET = 2


class Norm(enum.IntEnum):
    LINF = 0
    L2 = 1
    HMINUS1 = 2

    @property
    def sobolev_index(self) -> int:
        return {Norm.LINF: 0, Norm.L2: 0, Norm.HMINUS1: -1}[self]

    @classmethod
    def parse(cls, name: str) -> "Norm":
        key = name.strip().lower().replace("-", "").replace("_", "")
        table = {"linf": cls.LINF, "l2": cls.L2, "hm1": cls.HMINUS1, "hminus1": cls.HMINUS1}
        try:
            return table[key]
        except KeyError:
            raise UsageError(f"unknown norm {name!r}") from None


@dataclass(frozen=True, eq=False)
class MeshHierarchy:
    dim: int
    refinements: int
    vertex_coords: np.ndarray = field(repr=False)
    vertex_level: np.ndarray = field(repr=False)
    parents: np.ndarray = field(repr=False)
    level_vertices: tuple = field(repr=False)

    @property
    def levels(self) -> int:
        return self.refinements + 1

    @property
    def n_side(self) -> int:
        return 2**self.refinements + 1

    @property
    def size(self) -> int:
        return len(self.vertex_level)

    @property
    def vertices_per_level(self) -> list[int]:
        """Cumulative vertex count of the meshes on levels 0..refinements."""
        return [int(c) for c in np.cumsum([len(v) for v in self.level_vertices])]

    @cached_property
    def element_counts(self) -> np.ndarray:
        """Number of cells adjacent to each vertex on the level it lives on.

        The count only depends on where a vertex sits relative to the
        boundary, so it is the same on every level containing the vertex.
        """
        return _element_counts(self.dim, self.n_side)

    @cached_property
    def norm_operator(self) -> "NormOperator":
        return NormOperator.assemble(self)

    def descriptor(self) -> tuple[int, int]:
        return (self.dim, self.refinements)

    def matches(self, other: "MeshHierarchy") -> bool:
        return self.descriptor() == other.descriptor()


def _level_1d(i: np.ndarray, refinements: int) -> np.ndarray:
    i = np.asarray(i, dtype=np.int64)
    lvl = np.zeros(i.shape, dtype=np.int64)
    for r in range(1, refinements + 1):
        step = 1 << (refinements - r)
        mask = (i % step == 0) & (i % (2 * step) != 0)
        lvl[mask] = r
    return lvl


def build_hierarchy(dim: int, refinements: int, max_refinements: int | None = None) -> MeshHierarchy:
    """Uniformly refined hierarchy on the unit interval or the unit square."""
    if dim not in (1, 2):
        raise UsageError(f"dim must be 1 or 2, got {dim}")
    if refinements < 0:
        raise UsageError("refinements must be nonnegative")
    cap = MAX_REFINEMENTS[dim] if max_refinements is None else max_refinements
    if refinements > cap:
        raise CapacityError(f"{refinements} refinements exceed the cap of {cap} in {dim}D")

    n = 2**refinements + 1
    idx = np.arange(n, dtype=np.int64)
    lvl1 = _level_1d(idx, refinements)

    if dim == 1:
        coords = (idx / (n - 1)).reshape(-1, 1)
        level = lvl1
        parents = np.full((n, 2), -1, dtype=np.int64)
        for v in range(n):
            if level[v] > 0:
                h = 1 << (refinements - level[v])
                parents[v] = (v - h, v + h)
    else:
        jj, ii = np.meshgrid(idx, idx, indexing="ij")
        ii, jj = ii.ravel(), jj.ravel()
        coords = np.column_stack([ii / (n - 1), jj / (n - 1)])
        level = np.maximum(lvl1[ii], lvl1[jj])
        parents = np.full((n * n, 2), -1, dtype=np.int64)
        for l in range(1, refinements + 1):
            h = 1 << (refinements - l)
            sel = np.flatnonzero(level == l)
            i, j = ii[sel], jj[sel]
            odd_i = (i // h) % 2 == 1
            odd_j = (j // h) % 2 == 1
            di = np.where(odd_i, h, 0)
            dj = np.where(odd_j, h, 0)
            # both odd: midpoint of a diagonal (lower-left to upper-right)
            parents[sel, 0] = (i - di) + (j - dj) * n
            parents[sel, 1] = (i + di) + (j + dj) * n

    level_vertices = tuple(np.flatnonzero(level == l) for l in range(refinements + 1))
    for a in (coords, level, parents, *level_vertices):
        a.setflags(write=False)
    return MeshHierarchy(dim, refinements, coords, level, parents, level_vertices)


def _element_counts(dim: int, n: int) -> np.ndarray:
    if dim == 1:
        t = np.full(n, 2, dtype=np.int64)
        t[[0, -1]] = 1
        return t
    return np.bincount(_triangles(n).ravel(), minlength=n * n).astype(np.int64)


def _triangles(n: int) -> np.ndarray:
    """Triangles of the structured n x n grid, one diagonal direction."""
    j, i = np.meshgrid(np.arange(n - 1), np.arange(n - 1), indexing="ij")
    ll = (i + j * n).ravel()
    lr, ul, ur = ll + 1, ll + n, ll + n + 1
    lower = np.column_stack([ll, lr, ur])
    upper = np.column_stack([ll, ur, ul])
    return np.vstack([lower, upper])


def level_of(h: MeshHierarchy, i: int) -> int:
    if not 0 <= i < h.size:
        raise IndexError(f"vertex {i} out of range for hierarchy of size {h.size}")
    return int(h.vertex_level[i])


@dataclass
class CoefficientVector:
    values: np.ndarray
    basis: Basis = Basis.NODAL

    def __post_init__(self):
        self.values = np.asarray(self.values)

    def __len__(self):
        return len(self.values)

    def copy(self) -> "CoefficientVector":
        return CoefficientVector(self.values.copy(), self.basis)


def sample_function(h: MeshHierarchy, f) -> CoefficientVector:
    """Nodal interpolant of ``f``; ``f`` receives one coordinate array per axis."""
    values = np.asarray(f(*h.vertex_coords.T), dtype=np.float64)
    values = np.broadcast_to(values, (h.size,)).copy()
    return CoefficientVector(values, Basis.NODAL)


def prolong(h: MeshHierarchy, values: np.ndarray, level: int) -> np.ndarray:
    """Fill the vertices of ``level + 1`` by averaging their parents."""
    out = np.array(values, dtype=np.float64)
    v = h.level_vertices[level + 1]
    p = h.parents[v]
    out[v] = 0.5 * (out[p[:, 0]] + out[p[:, 1]])
    return out


def assemble_p1(dim: int, n: int) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Consistent mass and stiffness matrices of P1 elements on a uniform grid
    with ``n`` nodes per side of the unit interval or square."""
    hx = 1.0 / (n - 1)
    if dim == 1:
        cells = np.column_stack([np.arange(n - 1), np.arange(1, n)])
        m_loc = hx / 6.0 * np.array([[2.0, 1.0], [1.0, 2.0]])
        a_loc = 1.0 / hx * np.array([[1.0, -1.0], [-1.0, 1.0]])
        size = n
    else:
        cells = _triangles(n)
        area = 0.5 * hx * hx
        m_loc = area / 12.0 * np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]])
        size = n * n
    k = cells.shape[1]
    rows = np.repeat(cells, k, axis=1).ravel()
    cols = np.tile(cells, (1, k)).ravel()
    if dim == 1:
        m_data = np.tile(m_loc.ravel(), len(cells))
        a_data = np.tile(a_loc.ravel(), len(cells))
    else:
        ntri = len(cells) // 2
        pts = np.array([[0.0, 0.0], [hx, 0.0], [hx, hx], [0.0, hx]])
        a_blocks = [_p1_stiffness(pts[[0, 1, 2]]), _p1_stiffness(pts[[0, 2, 3]])]
        m_data = np.tile(m_loc.ravel(), len(cells))
        a_data = np.concatenate([np.tile(a_blocks[0].ravel(), ntri), np.tile(a_blocks[1].ravel(), ntri)])
    M = sp.coo_matrix((m_data, (rows, cols)), shape=(size, size)).tocsr()
    A = sp.coo_matrix((a_data, (rows, cols)), shape=(size, size)).tocsr()
    A.eliminate_zeros()
    return M, A


def _p1_stiffness(p: np.ndarray) -> np.ndarray:
    B = np.column_stack([np.ones(3), p])
    grads = np.linalg.inv(B)[1:]  # rows: d/dx, d/dy of the 3 barycentrics
    area = 0.5 * abs(np.linalg.det(B))
    return area * grads.T @ grads


@dataclass(frozen=True, eq=False)
class NormOperator:
    M: sp.csr_matrix
    A: sp.csr_matrix
    K: sp.csr_matrix
    rtol: float = 1e-10

    @classmethod
    def assemble(cls, h: MeshHierarchy, rtol: float = 1e-10) -> "NormOperator":
        M, A = assemble_p1(h.dim, h.n_side)
        return cls(M, A, (A + M).tocsr(), rtol)

    def solve_k(self, f: np.ndarray) -> np.ndarray:
        diag = self.K.diagonal()
        x, iters, ok = pcg(self.K.dot, f, lambda r: r / diag, rtol=self.rtol, maxiter=10 * len(f))
        if not ok:
            raise NumericError(f"H^-1 solve did not reach rtol {self.rtol} in {iters} iterations")
        return x


def norm(op: NormOperator, e, kind: Norm | str) -> float:
    """L-infinity, L2, or H^-1 norm of a nodal coefficient vector.

    The H^-1 norm is the dual norm of the full H1 inner product,
    ``sqrt(f^T (A+M)^{-1} f)`` with ``f = M e``.
    """
    if isinstance(e, CoefficientVector):
        if e.basis is not Basis.NODAL:
            raise UsageError(f"norms need nodal values, got {e.basis.name}")
        e = e.values
    e = np.asarray(e, dtype=np.float64)
    kind = Norm.parse(kind) if isinstance(kind, str) else Norm(kind)
    if e.shape != (op.M.shape[0],):
        raise UsageError(f"vector of length {e.size} does not match operator size {op.M.shape[0]}")
    if kind is Norm.LINF:
        return float(np.max(np.abs(e))) if e.size else 0.0
    f = op.M.dot(e)
    if kind is Norm.L2:
        return float(np.sqrt(max(e.dot(f), 0.0)))
    if not np.any(f):
        return 0.0
    return float(np.sqrt(max(f.dot(op.solve_k(f)), 0.0)))


def all_norms(op: NormOperator, e) -> dict[str, float]:
    return {k.name.lower(): norm(op, e, k) for k in Norm}


def hminus1_l2_bound(op: NormOperator, iters: int = 200, seed: int = 0) -> float:
    """Power-iteration estimate of the largest eigenvalue of ``K^{-1} M``.

    ``sqrt`` of it bounds the ratio of H^-1 to L2 norm.
    """
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(op.M.shape[0])
    lam = 0.0
    for _ in range(iters):
        y = op.solve_k(op.M.dot(x))
        lam_new = float(y.dot(op.M.dot(y)) / x.dot(op.M.dot(y)))
        x = y / np.sqrt(y.dot(op.M.dot(y)))
        if abs(lam_new - lam) <= 1e-10 * abs(lam_new):
            lam = lam_new
            break
        lam = lam_new
    return lam
