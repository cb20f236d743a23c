"""Hot numeric kernels with numba and pure-numpy implementations.

Every kernel exists twice: a ``*_np`` version written in vectorized numpy
and a ``*_nb`` version compiled with numba's ``@njit``. The public names
(``pairwise_dists``, ``snn_matrix``, ``gaussian_affinities``, ``tsne_grad``)
are bound to one implementation at import time:

* numba is used when it imports cleanly and the environment variable
  ``DRADAPT_NO_NUMBA`` is unset (or falsy);
* otherwise the numpy fallback is used.

Both paths produce equal results (SNN sums are exact small-integer
arithmetic; the floating-point kernels agree to rounding error), so the
choice only affects speed. ``benchmarks/bench_kernels.py`` compares them.
"""

import os

import numpy as np
from scipy.spatial.distance import pdist, squareform


def _env_disabled() -> bool:
    return os.environ.get("DRADAPT_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via DRADAPT_NO_NUMBA instead
    numba = None
    HAVE_NUMBA = False

NUMBA_ENABLED = HAVE_NUMBA and not _env_disabled()


# ---------------------------------------------------------------------------
# pairwise Euclidean distances


def pairwise_dists_np(points: np.ndarray) -> np.ndarray:
    """Dense symmetric distance matrix; each unordered pair computed once."""
    return squareform(pdist(points, metric="euclidean"))


def knn_weights(nn: np.ndarray, n: int) -> np.ndarray:
    """Rank-weighted kNN adjacency: entry (i, r-th neighbor of i) = k-r+1."""
    k = nn.shape[1]
    w = np.zeros((n, n), dtype=np.float64)
    rows = np.repeat(np.arange(n), k)
    w[rows, nn.ravel()] = np.tile(np.arange(k, 0, -1, dtype=np.float64), n)
    return w


def snn_matrix_np(nn: np.ndarray, n: int) -> np.ndarray:
    """Shared-neighbor similarity: sum of rank-weight products over shared NNs."""
    w = knn_weights(nn, n)
    s = w @ w.T
    np.fill_diagonal(s, 0.0)
    return s


def gaussian_affinities_np(dist_sq: np.ndarray, perplexity: float,
                           tol: float = 1e-5, max_steps: int = 64) -> np.ndarray:
    """Row-stochastic conditional affinities with per-row precision found by
    bisection so each row's entropy matches log(perplexity)."""
    n = dist_sq.shape[0]
    target = np.log(perplexity)
    p = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        d = np.delete(dist_sq[i], i)
        beta, lo, hi = 1.0, 0.0, np.inf
        row = np.exp(-d * beta)
        for _ in range(max_steps):
            s = row.sum()
            if s <= 0.0:
                h = -np.inf
            else:
                h = np.log(s) + beta * float(d @ row) / s
            diff = h - target
            if abs(diff) < tol:
                break
            if diff > 0:
                lo = beta
                beta = beta * 2.0 if hi == np.inf else 0.5 * (beta + hi)
            else:
                hi = beta
                beta = 0.5 * (beta + lo)
            row = np.exp(-d * beta)
        s = row.sum()
        if s > 0.0:
            row /= s
        p[i, :i] = row[:i]
        p[i, i + 1:] = row[i:]
    return p


def tsne_grad_np(y: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Gradient of the KL objective of exact t-SNE at embedding ``y``."""
    d2 = np.square(y[:, None, :] - y[None, :, :]).sum(-1)
    w = 1.0 / (1.0 + d2)
    np.fill_diagonal(w, 0.0)
    q = w / w.sum()
    pqw = (p - q) * w
    return 4.0 * ((np.diag(pqw.sum(axis=1)) - pqw) @ y)


def tsne_kl_np(y: np.ndarray, p: np.ndarray) -> float:
    """KL divergence between affinities ``p`` and the embedding's Student-t
    distribution; the t-SNE objective."""
    d2 = np.square(y[:, None, :] - y[None, :, :]).sum(-1)
    w = 1.0 / (1.0 + d2)
    np.fill_diagonal(w, 0.0)
    q = w / w.sum()
    mask = p > 0.0
    return float(np.sum(p[mask] * (np.log(p[mask]) - np.log(q[mask]))))


# ---------------------------------------------------------------------------
# numba twins

if HAVE_NUMBA:
    from numba import njit

    @njit(cache=True, nogil=True)
    def pairwise_dists_nb(points):
        n, d = points.shape
        out = np.zeros((n, n), dtype=np.float64)
        for i in range(n):
            for j in range(i + 1, n):
                acc = 0.0
                for c in range(d):
                    diff = points[i, c] - points[j, c]
                    acc += diff * diff
                dist = np.sqrt(acc)
                out[i, j] = dist
                out[j, i] = dist
        return out

    @njit(cache=True, nogil=True)
    def snn_matrix_nb(nn, n):
        k = nn.shape[1]
        # wt[p, j] = rank weight of p in j's NN list (0 when absent), so
        # row i of the result is a k-term combination of contiguous rows
        wt = np.zeros((n, n), dtype=np.float64)
        for j in range(n):
            for a in range(k):
                wt[nn[j, a], j] = k - a
        out = np.zeros((n, n), dtype=np.float64)
        for i in range(n):
            for a in range(k):
                w = float(k - a)
                row = wt[nn[i, a]]
                for j in range(n):
                    out[i, j] += w * row[j]
            out[i, i] = 0.0
        return out

    @njit(cache=True, nogil=True)
    def gaussian_affinities_nb(dist_sq, perplexity, tol=1e-5, max_steps=64):
        n = dist_sq.shape[0]
        target = np.log(perplexity)
        p = np.zeros((n, n), dtype=np.float64)
        row = np.empty(n, dtype=np.float64)
        for i in range(n):
            beta = 1.0
            lo = 0.0
            hi = np.inf
            for _ in range(max_steps):
                s = 0.0
                sd = 0.0
                for j in range(n):
                    if j == i:
                        row[j] = 0.0
                    else:
                        v = np.exp(-dist_sq[i, j] * beta)
                        row[j] = v
                        s += v
                        sd += dist_sq[i, j] * v
                if s <= 0.0:
                    diff = -np.inf - target
                else:
                    diff = np.log(s) + beta * sd / s - target
                if abs(diff) < tol:
                    break
                if diff > 0:
                    lo = beta
                    beta = beta * 2.0 if hi == np.inf else 0.5 * (beta + hi)
                else:
                    hi = beta
                    beta = 0.5 * (beta + lo)
            s = 0.0
            for j in range(n):
                s += row[j]
            if s > 0.0:
                for j in range(n):
                    p[i, j] = row[j] / s
        return p

    @njit(cache=True, nogil=True)
    def tsne_grad_nb(y, p):
        n = y.shape[0]
        w = np.empty((n, n), dtype=np.float64)
        z = 0.0
        for i in range(n):
            w[i, i] = 0.0
            for j in range(i + 1, n):
                dx = y[i, 0] - y[j, 0]
                dy = y[i, 1] - y[j, 1]
                v = 1.0 / (1.0 + dx * dx + dy * dy)
                w[i, j] = v
                w[j, i] = v
                z += 2.0 * v
        grad = np.zeros((n, 2), dtype=np.float64)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                coef = 4.0 * (p[i, j] - w[i, j] / z) * w[i, j]
                grad[i, 0] += coef * (y[i, 0] - y[j, 0])
                grad[i, 1] += coef * (y[i, 1] - y[j, 1])
        return grad

else:  # pragma: no cover
    pairwise_dists_nb = None
    snn_matrix_nb = None
    gaussian_affinities_nb = None
    tsne_grad_nb = None


if NUMBA_ENABLED:
    pairwise_dists = pairwise_dists_nb
    snn_matrix = snn_matrix_nb
    gaussian_affinities = gaussian_affinities_nb
    tsne_grad = tsne_grad_nb
else:
    pairwise_dists = pairwise_dists_np
    snn_matrix = snn_matrix_np
    gaussian_affinities = gaussian_affinities_np
    tsne_grad = tsne_grad_np

tsne_kl = tsne_kl_np
