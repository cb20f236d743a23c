"""Pairwise Euclidean distances, neighbor rankings, and rank matrices.

The dense N x N matrix is always materialized; the package targets desk
scale (N up to ~10,000). Distance ties are broken by ascending point index
everywhere, so every ranking is deterministic.
"""

import os
import struct
from dataclasses import dataclass

import numpy as np

from . import kernels
from .data import Dataset
from .errors import ParseError, ValidationError


@dataclass(frozen=True)
class NeighborRanking:
    """Per-point indices of the k nearest neighbors, nearest first."""

    k: int
    nn: np.ndarray  # (N, k) int64; row i never contains i

    def __post_init__(self):
        self.nn.setflags(write=False)

    @property
    def n(self) -> int:
        return self.nn.shape[0]


def _as_points(ds) -> np.ndarray:
    if isinstance(ds, Dataset):
        return ds.points
    pts = np.asarray(ds, dtype=np.float64)
    if pts.ndim != 2:
        raise ValidationError(f"expected 2-D point array, got shape {pts.shape}")
    return pts


def pairwise_distances(ds) -> np.ndarray:
    """Symmetric Euclidean distance matrix with an exactly zero diagonal."""
    return kernels.pairwise_dists(_as_points(ds))


def condensed(dm: np.ndarray) -> np.ndarray:
    """The N(N-1)/2 unordered pair distances (upper triangle, row-major)."""
    n = dm.shape[0]
    iu = np.triu_indices(n, k=1)
    return dm[iu]


def _neighbor_order(dm: np.ndarray) -> np.ndarray:
    """Rows of point indices sorted by (distance, index); self always first."""
    key = np.array(dm, dtype=np.float64, copy=True)
    np.fill_diagonal(key, -np.inf)
    return np.argsort(key, axis=1, kind="stable")


def neighbor_ranking(dm: np.ndarray, k: int) -> NeighborRanking:
    """The k nearest neighbors of every point, ties broken by ascending index."""
    n = dm.shape[0]
    if k < 1:
        raise ValidationError("k must be >= 1")
    if k >= n:
        raise ValidationError(f"k={k} must be <= N-1={n - 1}")
    order = _neighbor_order(dm)
    return NeighborRanking(k=k, nn=np.ascontiguousarray(order[:, 1:k + 1]))


def rank_matrix(dm: np.ndarray) -> np.ndarray:
    """Entry (i, j) is j's 1-based rank by ascending distance from i.

    Each off-diagonal row is a permutation of 1..N-1; the diagonal is 0.
    """
    n = dm.shape[0]
    order = _neighbor_order(dm)
    ranks = np.empty((n, n), dtype=np.int64)
    cols = np.arange(n)
    rows = np.repeat(np.arange(n), n)
    ranks[rows, order.ravel()] = np.tile(cols, n)
    return ranks


# ---------------------------------------------------------------------------
# optional binary cache
#
# Layout (little-endian): N as a 64-bit signed integer, then N*N row-major
# 64-bit floats. Files are keyed by the dataset's content hash.

_HEADER = struct.Struct("<q")


def save_distance_matrix(dm: np.ndarray, path) -> None:
    n = dm.shape[0]
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(n))
        fh.write(np.ascontiguousarray(dm, dtype="<f8").tobytes())


def load_distance_matrix(path) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise ParseError(f"{path}: truncated header")
        (n,) = _HEADER.unpack(head)
        if n < 1:
            raise ParseError(f"{path}: invalid point count {n}")
        body = fh.read()
    expected = n * n * 8
    if len(body) != expected:
        raise ParseError(f"{path}: expected {expected} payload bytes, got {len(body)}")
    return np.frombuffer(body, dtype="<f8").astype(np.float64).reshape(n, n)


def cached_pairwise_distances(ds: Dataset, cache_dir) -> np.ndarray:
    """Compute (or reload) the distance matrix, cached by content hash."""
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, ds.content_hash() + ".dmat")
    if os.path.exists(path):
        dm = load_distance_matrix(path)
        if dm.shape[0] == ds.n:
            return dm
    dm = pairwise_distances(ds)
    save_distance_matrix(dm, path)
    return dm
