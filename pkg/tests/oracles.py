"""Brute-force definitional oracles.

Everything here is written as a direct transcription of the definitions,
with explicit loops and no shared code with the package's fast paths, so
the two routes stay independent.
"""

import math

import numpy as np


def dist_oracle(points):
    n = len(points)
    d = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j:
                d[i][j] = math.sqrt(sum((points[i][c] - points[j][c]) ** 2
                                        for c in range(len(points[i]))))
    return d


def neighbor_order_oracle(d, i):
    """All points j != i sorted by (distance to i, index)."""
    n = len(d)
    return sorted((j for j in range(n) if j != i), key=lambda j: (d[i][j], j))


def knn_oracle(points, k):
    d = dist_oracle(points)
    return [neighbor_order_oracle(d, i)[:k] for i in range(len(points))]


def rank_oracle(points):
    d = dist_oracle(points)
    n = len(d)
    ranks = [[0] * n for _ in range(n)]
    for i in range(n):
        for r, j in enumerate(neighbor_order_oracle(d, i), start=1):
            ranks[i][j] = r
    return ranks


def knn_matrix_oracle(nn, n, k):
    m = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for r, j in enumerate(nn[i], start=1):
            m[i][j] = max(0, k - r + 1)
    return m


def snn_matrix_oracle(nn, n, k):
    s = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            acc = 0.0
            for m_rank, p in enumerate(nn[i], start=1):
                for n_rank, q in enumerate(nn[j], start=1):
                    if p == q:
                        acc += (k + 1 - m_rank) * (k + 1 - n_rank)
            s[i][j] = acc
    return s


def _cosine(a, b):
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(x * x for x in b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return sum(x * y for x, y in zip(a, b)) / (na * nb)


def mnc_oracle(points, k):
    n = len(points)
    nn = knn_oracle(points, k)
    m_knn = knn_matrix_oracle(nn, n, k)
    m_snn = snn_matrix_oracle(nn, n, k)
    return sum(_cosine(m_knn[i], m_snn[i]) for i in range(n)) / n


def pds_oracle(points):
    d = dist_oracle(points)
    n = len(d)
    pairs = [d[i][j] for i in range(n) for j in range(i + 1, n)]
    mean = sum(pairs) / len(pairs)
    var = sum((p - mean) ** 2 for p in pairs) / len(pairs)
    return math.log(math.sqrt(var) / mean)


def trustworthiness_oracle(hi_points, lo_points, k):
    rank_hi = rank_oracle(hi_points)
    rank_lo = rank_oracle(lo_points)
    n = len(hi_points)
    penalty = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if rank_lo[i][j] <= k and rank_hi[i][j] > k:
                penalty += rank_hi[i][j] - k
    return 1.0 - 2.0 / (n * k * (2 * n - 3 * k - 1)) * penalty


def continuity_oracle(hi_points, lo_points, k):
    return trustworthiness_oracle(lo_points, hi_points, k)


def mrre_oracle(hi_points, lo_points, k):
    rank_hi = rank_oracle(hi_points)
    rank_lo = rank_oracle(lo_points)
    n = len(hi_points)
    cmax = n * sum(abs(n - 2 * r + 1) / r for r in range(1, k + 1))
    err_hi = err_lo = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if rank_hi[i][j] <= k:
                err_hi += abs(rank_lo[i][j] - rank_hi[i][j]) / rank_hi[i][j]
            if rank_lo[i][j] <= k:
                err_lo += abs(rank_hi[i][j] - rank_lo[i][j]) / rank_lo[i][j]
    return 1.0 - err_hi / cmax, 1.0 - err_lo / cmax


def _avg_ranks(values):
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for t in range(i, j + 1):
            ranks[order[t]] = avg
        i = j + 1
    return ranks


def _pearson(a, b):
    n = len(a)
    ma = sum(a) / n
    mb = sum(b) / n
    cov = sum((x - ma) * (y - mb) for x, y in zip(a, b))
    va = sum((x - ma) ** 2 for x in a)
    vb = sum((y - mb) ** 2 for y in b)
    return cov / math.sqrt(va * vb)


def condensed_oracle(points):
    d = dist_oracle(points)
    n = len(d)
    return [d[i][j] for i in range(n) for j in range(i + 1, n)]


def spearman_oracle(hi_points, lo_points):
    a = condensed_oracle(hi_points)
    b = condensed_oracle(lo_points)
    return _pearson(_avg_ranks(a), _avg_ranks(b))


def pearson_oracle(hi_points, lo_points):
    return _pearson(condensed_oracle(hi_points), condensed_oracle(lo_points))


def pca_oracle(points):
    """Top-2 principal components via explicit covariance eigendecomposition."""
    x = np.asarray(points, dtype=np.float64)
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / len(x)
    evals, evecs = np.linalg.eigh(cov)
    comps = evecs[:, ::-1][:, :2]
    return centered @ comps


def sample_skewness(values):
    """Plain third standardized moment (population form)."""
    v = np.asarray(values, dtype=np.float64)
    mu = v.mean()
    sd = v.std()
    return float(np.mean(((v - mu) / sd) ** 3))
