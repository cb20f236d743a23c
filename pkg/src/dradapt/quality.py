"""Scale-invariant projection quality metrics, each normalized so that
higher means more accurate.

Local metrics (trustworthiness & continuity, MRRE) consume precomputed
rank matrices; global metrics (Spearman rho, Pearson r) consume distance
matrices. ``score_projection`` and ``ProjectionScorer`` wrap them behind a
single (X, Y) -> value contract keyed by metric id, which is also the
plugin surface for additional metrics.
"""

import numpy as np
from scipy.stats import rankdata

from .data import Dataset
from .distance import condensed, pairwise_distances, rank_matrix
from .errors import DegenerateInputError, ValidationError

DEFAULT_EVAL_K = 10


def _check_pair(rank_hi, rank_lo):
    if rank_hi.shape != rank_lo.shape or rank_hi.shape[0] != rank_hi.shape[1]:
        raise ValidationError(
            f"rank matrices must be square and matching, got {rank_hi.shape} vs {rank_lo.shape}")
    return rank_hi.shape[0]


def trustworthiness(rank_hi: np.ndarray, rank_lo: np.ndarray, k: int) -> float:
    """Penalty for false neighbors: points in the low-dim kNN but not the
    high-dim kNN, weighted by their high-dim rank excess over k."""
    n = _check_pair(rank_hi, rank_lo)
    if not 1 <= k < n / 2:
        raise ValidationError(f"k must satisfy 1 <= k < N/2, got k={k}, N={n}")
    false_nb = (rank_lo >= 1) & (rank_lo <= k) & (rank_hi > k)
    penalty = float((rank_hi[false_nb] - k).sum())
    return 1.0 - 2.0 / (n * k * (2 * n - 3 * k - 1)) * penalty


def continuity(rank_hi: np.ndarray, rank_lo: np.ndarray, k: int) -> float:
    """Penalty for missing neighbors; trustworthiness with the spaces swapped."""
    return trustworthiness(rank_lo, rank_hi, k)


def f1(a: float, b: float) -> float:
    """Harmonic mean; 0 when both inputs are 0."""
    if a + b == 0.0:
        return 0.0
    return 2.0 * a * b / (a + b)


tnc_f1 = f1
mrre_f1 = f1


def _mrre_cmax(n: int, k: int) -> float:
    r = np.arange(1, k + 1, dtype=np.float64)
    return float(np.sum(np.abs(n - 2 * r + 1) / r))


def mrre(rank_hi: np.ndarray, rank_lo: np.ndarray, k: int) -> tuple[float, float]:
    """Mean relative rank errors in both directions, mapped so 1 = no error.

    The first element sums |rank_lo - rank_hi| / rank_hi over each point's
    high-dim kNN (missing neighbors); the second swaps the roles (false
    neighbors). Both are divided by the worst-case normalizer
    N * sum_{r=1..k} |N - 2r + 1| / r and subtracted from 1.
    """
    n = _check_pair(rank_hi, rank_lo)
    if not 1 <= k < n - 1:
        raise ValidationError(f"k must satisfy 1 <= k < N-1, got k={k}, N={n}")
    norm = n * _mrre_cmax(n, k)
    hi = rank_hi.astype(np.float64)
    lo = rank_lo.astype(np.float64)
    in_hi = (rank_hi >= 1) & (rank_hi <= k)
    in_lo = (rank_lo >= 1) & (rank_lo <= k)
    err_hi = float((np.abs(lo - hi)[in_hi] / hi[in_hi]).sum())
    err_lo = float((np.abs(hi - lo)[in_lo] / lo[in_lo]).sum())
    return 1.0 - err_hi / norm, 1.0 - err_lo / norm


def _condensed_pair(dm_hi, dm_lo):
    dm_hi = np.asarray(dm_hi, dtype=np.float64)
    dm_lo = np.asarray(dm_lo, dtype=np.float64)
    if dm_hi.shape != dm_lo.shape or dm_hi.shape[0] != dm_hi.shape[1]:
        raise ValidationError(
            f"distance matrices must be square and matching, got {dm_hi.shape} vs {dm_lo.shape}")
    if dm_hi.shape[0] < 3:
        raise ValidationError("need at least 3 points")
    return condensed(dm_hi), condensed(dm_lo)


def pearson_r(dm_hi: np.ndarray, dm_lo: np.ndarray) -> float:
    """Pearson correlation over the unordered pairwise distances."""
    a, b = _condensed_pair(dm_hi, dm_lo)
    if a.std() == 0.0 or b.std() == 0.0:
        raise DegenerateInputError("correlation undefined: zero distance variance")
    return float(np.corrcoef(a, b)[0, 1])


def spearman_rho(dm_hi: np.ndarray, dm_lo: np.ndarray) -> float:
    """Spearman rank correlation over the unordered pairwise distances,
    with average ranks for ties."""
    a, b = _condensed_pair(dm_hi, dm_lo)
    if a.min() == a.max() or b.min() == b.max():
        raise DegenerateInputError("correlation undefined: zero distance variance")
    ra = rankdata(a, method="average")
    rb = rankdata(b, method="average")
    return float(np.corrcoef(ra, rb)[0, 1])


# ---------------------------------------------------------------------------
# metric registry: id -> (X, Y) scorer

_REGISTRY: dict[str, dict] = {}


def register_metric(metric_id: str, fn, value_range: tuple[float, float],
                    needs_k: bool = False) -> None:
    """Register a projection quality metric.

    ``fn(points_hi, points_lo, k)`` must return a float within
    ``value_range`` and be invariant to global scaling of either space.
    """
    _REGISTRY[metric_id] = {"fn": fn, "range": value_range, "needs_k": needs_k}


def metric_ids() -> list[str]:
    return sorted(_REGISTRY)


def metric_range(metric_id: str) -> tuple[float, float]:
    if metric_id not in _REGISTRY:
        raise ValidationError(f"unknown metric {metric_id!r}; known: {metric_ids()}")
    return _REGISTRY[metric_id]["range"]


def _as_points(x) -> np.ndarray:
    if isinstance(x, Dataset):
        return x.points
    return np.asarray(x, dtype=np.float64)


def _tnc_score(hi, lo, k):
    rhi, rlo = rank_matrix(pairwise_distances(hi)), rank_matrix(pairwise_distances(lo))
    return f1(trustworthiness(rhi, rlo, k), continuity(rhi, rlo, k))


def _mrre_score(hi, lo, k):
    rhi, rlo = rank_matrix(pairwise_distances(hi)), rank_matrix(pairwise_distances(lo))
    return f1(*mrre(rhi, rlo, k))


register_metric("tnc", _tnc_score, (0.0, 1.0), needs_k=True)
register_metric("mrre", _mrre_score, (0.0, 1.0), needs_k=True)
register_metric("spearman",
                lambda hi, lo, k: spearman_rho(pairwise_distances(hi), pairwise_distances(lo)),
                (-1.0, 1.0))
register_metric("pearson",
                lambda hi, lo, k: pearson_r(pairwise_distances(hi), pairwise_distances(lo)),
                (-1.0, 1.0))


def score_projection(metric_id: str, hi, lo, k: int = DEFAULT_EVAL_K) -> float:
    """Score a projection ``lo`` of the data ``hi`` under one metric."""
    if metric_id not in _REGISTRY:
        raise ValidationError(f"unknown metric {metric_id!r}; known: {metric_ids()}")
    hi_pts, lo_pts = _as_points(hi), _as_points(lo)
    if hi_pts.shape[0] != lo_pts.shape[0]:
        raise ValidationError(
            f"point counts differ: {hi_pts.shape[0]} vs {lo_pts.shape[0]}")
    return float(_REGISTRY[metric_id]["fn"](hi_pts, lo_pts, k))


class ProjectionScorer:
    """Scores many projections of one dataset, reusing the high-dim side.

    The distance and rank matrices of the original data are computed once;
    each call only pays for the low-dimensional side.
    """

    def __init__(self, ds, metric_id: str, k: int = DEFAULT_EVAL_K):
        if metric_id not in _REGISTRY:
            raise ValidationError(f"unknown metric {metric_id!r}; known: {metric_ids()}")
        self.metric_id = metric_id
        self.k = k
        self._pts = _as_points(ds)
        self._dm_hi = pairwise_distances(self._pts)
        self._rank_hi = rank_matrix(self._dm_hi) if metric_id in ("tnc", "mrre") else None

    def __call__(self, projection) -> float:
        pts = _as_points(projection)
        if pts.shape[0] != self._pts.shape[0]:
            raise ValidationError(
                f"projection has {pts.shape[0]} rows, expected {self._pts.shape[0]}")
        if self.metric_id == "tnc":
            rlo = rank_matrix(pairwise_distances(pts))
            return f1(trustworthiness(self._rank_hi, rlo, self.k),
                      continuity(self._rank_hi, rlo, self.k))
        if self.metric_id == "mrre":
            rlo = rank_matrix(pairwise_distances(pts))
            return f1(*mrre(self._rank_hi, rlo, self.k))
        if self.metric_id == "spearman":
            return spearman_rho(self._dm_hi, pairwise_distances(pts))
        if self.metric_id == "pearson":
            return pearson_r(self._dm_hi, pairwise_distances(pts))
        return score_projection(self.metric_id, self._pts, pts, self.k)
