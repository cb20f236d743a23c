"""Isomap and locally linear embedding."""

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from ..distance import neighbor_ranking, pairwise_distances
from ..errors import ProjectionError, ValidationError
from .linear import classical_mds_embed


def _knn_graph(dm: np.ndarray, n_neighbors: int) -> np.ndarray:
    n = dm.shape[0]
    nr = neighbor_ranking(dm, n_neighbors)
    w = np.zeros((n, n), dtype=np.float64)
    rows = np.repeat(np.arange(n), n_neighbors)
    cols = nr.nn.ravel()
    w[rows, cols] = dm[rows, cols]
    return np.maximum(w, w.T)  # union symmetrization


def _connect_components(w: np.ndarray, dm: np.ndarray) -> np.ndarray:
    """Bridge disconnected neighborhood graphs through their closest
    inter-component point pair until one component remains."""
    w = w.copy()
    while True:
        n_comp, labels = connected_components(csr_matrix(w), directed=False)
        if n_comp == 1:
            return w
        cross = labels[:, None] != labels[None, :]
        masked = np.where(cross, dm, np.inf)
        i, j = np.unravel_index(int(np.argmin(masked)), masked.shape)
        w[i, j] = w[j, i] = dm[i, j]


def isomap_embed(points: np.ndarray, n_neighbors: int) -> np.ndarray:
    """Classical MDS over graph geodesic distances."""
    n = points.shape[0]
    if not 1 <= n_neighbors < n:
        raise ValidationError(f"n_neighbors must be in [1, N-1], got {n_neighbors}")
    dm = pairwise_distances(points)
    graph = _connect_components(_knn_graph(dm, n_neighbors), dm)
    geo = shortest_path(csr_matrix(graph), method="D", directed=False)
    if not np.isfinite(geo).all():
        raise ProjectionError("geodesic distances not finite", technique="isomap")
    return classical_mds_embed(geo)


def lle_embed(points: np.ndarray, n_neighbors: int, regularization: float) -> np.ndarray:
    """Standard LLE: reconstruction weights from regularized local Gram
    systems, embedding from the bottom eigenvectors of (I-W)^T (I-W)."""
    n, _ = points.shape
    if not 1 <= n_neighbors < n:
        raise ValidationError(f"n_neighbors must be in [1, N-1], got {n_neighbors}")
    if regularization <= 0:
        raise ValidationError("regularization must be positive")
    dm = pairwise_distances(points)
    nn = neighbor_ranking(dm, n_neighbors).nn
    w = np.zeros((n, n), dtype=np.float64)
    ones = np.ones(n_neighbors)
    for i in range(n):
        z = points[nn[i]] - points[i]
        g = z @ z.T
        trace = np.trace(g)
        g = g + regularization * (trace if trace > 0 else 1.0) * np.eye(n_neighbors)
        try:
            wi = np.linalg.solve(g, ones)
        except np.linalg.LinAlgError as exc:
            raise ProjectionError(f"local Gram solve failed at point {i}: {exc}",
                                  technique="lle")
        s = wi.sum()
        if s == 0 or not np.isfinite(s):
            raise ProjectionError(f"degenerate weights at point {i}", technique="lle")
        w[i, nn[i]] = wi / s
    m = np.eye(n) - w
    m = m.T @ m
    try:
        _, evecs = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise ProjectionError(f"embedding eigensolve failed: {exc}", technique="lle")
    y = evecs[:, 1:3]  # skip the constant eigenvector
    if not np.isfinite(y).all():
        raise ProjectionError("non-finite embedding", technique="lle")
    return np.ascontiguousarray(y)
