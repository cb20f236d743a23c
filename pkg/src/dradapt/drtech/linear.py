"""PCA and classical (Torgerson) MDS."""

import numpy as np

from ..errors import ProjectionError


def _fix_signs(components: np.ndarray) -> np.ndarray:
    # deterministic orientation: largest-magnitude loading made positive
    out = components.copy()
    for i in range(out.shape[0]):
        j = int(np.argmax(np.abs(out[i])))
        if out[i, j] < 0:
            out[i] = -out[i]
    return out


def pca_embed(points: np.ndarray) -> np.ndarray:
    """Project onto the top-2 principal components (zero-padded if D=1)."""
    centered = points - points.mean(axis=0)
    try:
        _, _, vt = np.linalg.svd(centered, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ProjectionError(f"SVD failed: {exc}", technique="pca")
    comps = _fix_signs(vt[:2])
    y = centered @ comps.T
    if y.shape[1] < 2:
        y = np.column_stack([y, np.zeros(len(y))])
    return y


def classical_mds_embed(dissim: np.ndarray, distance_power: float = 1.0) -> np.ndarray:
    """Classical MDS of a dissimilarity matrix.

    ``distance_power`` pre-transforms the dissimilarities element-wise
    before the usual double centering; 1.0 recovers vanilla Torgerson
    scaling. Negative eigenvalues are clipped to zero.
    """
    delta = np.power(dissim, distance_power)
    a = -0.5 * delta * delta
    b = a - a.mean(axis=0) - a.mean(axis=1)[:, None] + a.mean()
    try:
        evals, evecs = np.linalg.eigh(b)
    except np.linalg.LinAlgError as exc:
        raise ProjectionError(f"eigensolve failed: {exc}", technique="mds-classical")
    top = np.clip(evals[-2:][::-1], 0.0, None)
    vecs = _fix_signs(evecs[:, -2:][:, ::-1].T).T
    y = vecs * np.sqrt(top)
    if not np.isfinite(y).all():
        raise ProjectionError("non-finite embedding", technique="mds-classical")
    return y
