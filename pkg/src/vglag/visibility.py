"""Natural visibility graphs stored as packed bit rows, and the Frobenius distance between them.

Two nodes ``q < s`` are joined when every intermediate sample lies strictly
below the straight line between ``(q, y_q)`` and ``(s, y_s)``. Points exactly on
the line block visibility, so collinear runs give path segments. Comparisons
are exact floating point, with no tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterable

import numba
import numpy as np

from .timeseries import SeriesError, TimeSeries

__all__ = [
    "AdjacencyMatrix",
    "visible",
    "build_graph_reference",
    "build_graph_fast",
    "build_graph",
    "edge_difference",
    "frobenius_distance",
]


def _row_bytes(n: int) -> int:
    return (n + 7) // 8


@dataclass(frozen=True, eq=False)
class AdjacencyMatrix:
    """Symmetric 0/1 matrix with zero diagonal, one packed bit row per node.

    Bit order follows ``np.packbits``: column ``j`` of row ``i`` is bit
    ``7 - j % 8`` of byte ``rows[i, j // 8]``. Padding bits are zero.
    """

    n: int
    rows: np.ndarray

    def __post_init__(self):
        rows = np.ascontiguousarray(self.rows, dtype=np.uint8)
        if rows.shape != (self.n, _row_bytes(self.n)):
            raise ValueError(f"rows shape {rows.shape} does not fit n={self.n}")
        rows.flags.writeable = False
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_dense(cls, dense) -> "AdjacencyMatrix":
        dense = np.asarray(dense, dtype=bool)
        if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {dense.shape}")
        return cls(dense.shape[0], np.packbits(dense, axis=1))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "AdjacencyMatrix":
        """Build from 0-based undirected edges."""
        dense = np.zeros((n, n), dtype=bool)
        for i, j in edges:
            if i == j:
                raise ValueError(f"self loop at node {i}")
            dense[i, j] = dense[j, i] = True
        return cls.from_dense(dense)

    def to_dense(self) -> np.ndarray:
        return np.unpackbits(self.rows, axis=1, count=self.n).astype(bool)

    def __getitem__(self, ij: tuple[int, int]) -> bool:
        i, j = ij
        return bool((self.rows[i, j >> 3] >> (7 - (j & 7))) & 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AdjacencyMatrix):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.rows, other.rows)

    __hash__ = None  # type: ignore[assignment]

    def degrees(self) -> np.ndarray:
        return np.bitwise_count(self.rows).sum(axis=1, dtype=np.int64)

    @property
    def edge_count(self) -> int:
        return int(self.degrees().sum()) // 2

    def edges(self) -> list[tuple[int, int]]:
        """Sorted 0-based edges ``(i, j)`` with ``i < j``."""
        iu, ju = np.nonzero(np.triu(self.to_dense(), k=1))
        return list(zip(iu.tolist(), ju.tolist()))

    def write_edge_list(self, dest: IO) -> None:
        """Write ``"i j"`` lines, 1-based, ``i < j``, sorted."""
        for i, j in self.edges():
            dest.write(f"{i + 1} {j + 1}\n")

    @classmethod
    def read_edge_list(cls, n: int, source: IO) -> "AdjacencyMatrix":
        edges = []
        for lineno, line in enumerate(source, 1):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'i j', got {line!r}")
            i, j = int(parts[0]) - 1, int(parts[1]) - 1
            if not (0 <= i < j < n):
                raise ValueError(f"line {lineno}: edge {line!r} out of range for n={n}")
            edges.append((i, j))
        return cls.from_edges(n, edges)


def _values(ts: TimeSeries | np.ndarray) -> np.ndarray:
    if isinstance(ts, TimeSeries):
        y = ts.require_complete("visibility graph construction")
    else:
        y = np.asarray(ts, dtype=np.float64)
        if np.isnan(y).any():
            raise SeriesError("visibility graph construction requires a complete series")
    if y.ndim != 1 or y.size < 2:
        raise SeriesError(f"need a 1-D series of length >= 2, got shape {y.shape}")
    return y


def visible(ts: TimeSeries | np.ndarray, q: int, s: int) -> bool:
    """Whether samples ``q < s`` (0-based) see each other."""
    if q >= s:
        raise ValueError(f"need q < s, got q={q}, s={s}")
    y = _values(ts)
    if q < 0 or s >= y.size:
        raise IndexError(f"indices ({q}, {s}) out of range for length {y.size}")
    yq, ys = y[q], y[s]
    for r in range(q + 1, s):
        if not y[r] < ys + (yq - ys) * (s - r) / (s - q):
            return False
    return True


def build_graph_reference(ts: TimeSeries | np.ndarray) -> AdjacencyMatrix:
    """Evaluate the visibility inequality for every pair and every intermediate point.

    O(n^3) work; intended as the oracle for :func:`build_graph_fast`. Each
    anchor ``q`` is vectorised over all ``(s, r)`` pairs, with the same
    arithmetic as :func:`visible`.
    """
    y = _values(ts)
    n = y.size
    t = np.arange(n, dtype=np.float64)
    dense = np.zeros((n, n), dtype=bool)
    for q in range(n - 1):
        s = t[q + 1 :, None]
        r = t[None, q + 1 :]
        ys = y[q + 1 :, None]
        yr = y[None, q + 1 :]
        with np.errstate(invalid="ignore", divide="ignore"):
            line = ys + (y[q] - ys) * (s - r) / (s - t[q])
        below = yr < line
        between = r < s
        dense[q, q + 1 :] = np.all(below | ~between, axis=1)
    dense |= dense.T
    return AdjacencyMatrix.from_dense(dense)


@numba.njit(cache=True, nogil=True)
def _sweep_packed(y, rows):
    n = y.shape[0]
    for q in range(n - 1):
        yq = y[q]
        best = -np.inf
        for s in range(q + 1, n):
            slope = (y[s] - yq) / (s - q)
            if slope > best:
                rows[q, s >> 3] |= np.uint8(0x80 >> (s & 7))
                rows[s, q >> 3] |= np.uint8(0x80 >> (q & 7))
                best = slope


def build_graph_fast(ts: TimeSeries | np.ndarray) -> AdjacencyMatrix:
    """Visibility graph by a running-maximum-slope sweep, O(n^2).

    For each anchor ``q`` the sweep keeps the steepest slope seen from ``q``
    so far; ``s`` is visible exactly when its own slope exceeds it.
    """
    y = np.ascontiguousarray(_values(ts))
    n = y.size
    rows = np.zeros((n, _row_bytes(n)), dtype=np.uint8)
    _sweep_packed(y, rows)
    return AdjacencyMatrix(n, rows)


build_graph = build_graph_fast


def edge_difference(a: AdjacencyMatrix, b: AdjacencyMatrix) -> int:
    """Number of undirected edges present in exactly one of ``a`` and ``b``."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    return int(np.bitwise_count(np.bitwise_xor(a.rows, b.rows)).sum(dtype=np.int64)) // 2


def frobenius_distance(a: AdjacencyMatrix, b: AdjacencyMatrix) -> float:
    """``sqrt(sum((A - B)**2))``, i.e. ``sqrt(2 * edge_difference(a, b))``."""
    return math.sqrt(2 * edge_difference(a, b))
