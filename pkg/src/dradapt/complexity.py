"""Structural complexity scores of high-dimensional point sets.

Two scores are computed, both depending only on the Euclidean distance
matrix and both invariant to global scaling of the data:

* ``pds`` — log of (standard deviation / mean) of all unordered pairwise
  distances. Distance concentration pushes this down, so lower values mean
  a more complex global structure.
* ``mnc`` — mean row-wise cosine similarity between a rank-weighted kNN
  similarity matrix and the shared-nearest-neighbor similarity matrix
  derived from it. Lies in [0, 1]; lower values mean the two neighborhood
  views disagree more, i.e. a more complex local structure.

``complexity_features`` bundles PDS with MNC at several neighborhood sizes
into the feature vector consumed by the regression models.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .data import Dataset
from .distance import NeighborRanking, condensed, neighbor_ranking, pairwise_distances
from .errors import DegenerateInputError, ValidationError

DEFAULT_KS = (25, 50, 75)


@dataclass(frozen=True)
class FeatureVector:
    """Ordered (metric, k, value) triples; canonically PDS then MNC per k."""

    entries: tuple

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, _, v in self.entries], dtype=np.float64)

    @property
    def labels(self) -> list[str]:
        return [m if k is None else f"{m}-{k}" for m, k, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def to_dict(self) -> dict:
        return {label: value for label, (_, _, value) in zip(self.labels, self.entries)}


def pds(dm: np.ndarray) -> float:
    """Pairwise distance shift: ln(sigma / mean) over unordered pair distances.

    Uses the population standard deviation. Raises DegenerateInputError when
    every pairwise distance is equal (zero variance), e.g. on an equilateral
    simplex.
    """
    d = condensed(np.asarray(dm, dtype=np.float64))
    if d.size < 1:
        raise ValidationError("distance matrix must cover at least 2 points")
    if d.min() == d.max():
        raise DegenerateInputError("complexity undefined: zero distance variance")
    sigma = float(d.std())
    mean = float(d.mean())
    if sigma == 0.0 or mean == 0.0:
        raise DegenerateInputError("complexity undefined: zero distance variance")
    return float(np.log(sigma / mean))


def knn_similarity_matrix(nr: NeighborRanking) -> np.ndarray:
    """Dense rank-weighted kNN similarity: entry (i, r-th NN of i) = k-r+1."""
    return kernels.knn_weights(nr.nn, nr.n)


def snn_similarity_matrix(nr: NeighborRanking) -> np.ndarray:
    """Dense shared-neighbor similarity.

    Entry (i, j) sums (k+1-m)(k+1-n) over every point that is both the m-th
    neighbor of i and the n-th neighbor of j; the diagonal is zero. All
    terms are small integers, so the result is exact.
    """
    return kernels.snn_matrix(nr.nn, nr.n)


def _row_cosines(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    num = np.einsum("ij,ij->i", a, b)
    denom = np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1)
    # a zero SNN row means the point shares no neighbors with anyone:
    # maximal inconsistency, scored 0
    return np.where(denom > 0.0, num / np.where(denom > 0.0, denom, 1.0), 0.0)


def _resolve_ranking(ds_or_nr, k: int) -> NeighborRanking:
    if isinstance(ds_or_nr, NeighborRanking):
        if k > ds_or_nr.k:
            raise ValidationError(
                f"requested k={k} exceeds ranking's k={ds_or_nr.k}")
        if k == ds_or_nr.k:
            return ds_or_nr
        return NeighborRanking(k=k, nn=np.ascontiguousarray(ds_or_nr.nn[:, :k]))
    if isinstance(ds_or_nr, Dataset):
        if k >= ds_or_nr.n:
            raise ValidationError(f"k={k} must be <= N-1={ds_or_nr.n - 1}")
        return neighbor_ranking(pairwise_distances(ds_or_nr), k)
    raise ValidationError(
        f"expected Dataset or NeighborRanking, got {type(ds_or_nr).__name__}")


def mnc(ds_or_nr, k: int) -> float:
    """Mutual neighbor consistency in [0, 1]; rank-based, so exactly
    invariant to global scaling."""
    if k < 1:
        raise ValidationError("k must be >= 1")
    nr = _resolve_ranking(ds_or_nr, k)
    w = knn_similarity_matrix(nr)
    s = snn_similarity_matrix(nr)
    return float(_row_cosines(w, s).mean())


def complexity_features(ds: Dataset, ks=DEFAULT_KS) -> FeatureVector:
    """PDS plus MNC at each requested k, computed over one shared distance
    matrix and neighbor ranking."""
    ks = list(ks)
    if not ks:
        raise ValidationError("need at least one k for MNC")
    if any(k < 1 for k in ks):
        raise ValidationError("every k must be >= 1")
    if max(ks) >= ds.n:
        raise ValidationError(
            f"max k={max(ks)} must be <= N-1={ds.n - 1}")
    dm = pairwise_distances(ds)
    entries = [("pds", None, pds(dm))]
    nr = neighbor_ranking(dm, max(ks))
    for k in ks:
        entries.append(("mnc", int(k), mnc(nr, k)))
    return FeatureVector(entries=tuple(entries))


def clamped_ks(ks, n: int) -> list[int]:
    """Clamp neighborhood sizes to N-1, deduplicating while keeping order.

    Used by the CLI so oversized defaults degrade with a warning instead of
    failing on small datasets.
    """
    out = []
    for k in ks:
        kk = min(int(k), n - 1)
        if kk >= 1 and kk not in out:
            out.append(kk)
    return out
