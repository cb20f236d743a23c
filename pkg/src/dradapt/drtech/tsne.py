"""Exact (non-Barnes-Hut) t-SNE.

O(N^2) per iteration, which is fine at desk scale and keeps the gradient
exact. Early exaggeration is fixed at 12 for the first 250 iterations;
momentum switches from 0.5 to 0.8 at the same point, with the usual
per-coordinate gain adaptation.
"""

import numpy as np

from .. import kernels
from ..errors import ProjectionError, ValidationError
from ..seeding import generator

EARLY_EXAGGERATION = 12.0
EXAGGERATION_ITERS = 250
MIN_GAIN = 0.01


def joint_affinities(points: np.ndarray, perplexity: float) -> np.ndarray:
    """Symmetrized affinity matrix P summing to 1.

    Per-point precisions are found by bisection so each conditional
    distribution's entropy matches log(perplexity).
    """
    n = points.shape[0]
    if not 1.0 < perplexity <= (n - 1):
        raise ValidationError(
            f"perplexity must be in (1, N-1], got {perplexity} for N={n}")
    d = points[:, None, :] - points[None, :, :]
    dist_sq = np.square(d).sum(-1)
    cond = kernels.gaussian_affinities(dist_sq, float(perplexity))
    p = (cond + cond.T) / (2.0 * n)
    total = p.sum()
    if total <= 0.0:
        raise ProjectionError("affinities degenerate", technique="tsne-exact")
    return p / total


def kl_divergence(y: np.ndarray, p: np.ndarray) -> float:
    """The t-SNE objective at embedding ``y``."""
    return kernels.tsne_kl(y, p)


def kl_gradient(y: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Analytic gradient of ``kl_divergence`` with respect to ``y``."""
    return kernels.tsne_grad(np.ascontiguousarray(y), p)


def tsne_embed(points: np.ndarray, perplexity: float, learning_rate: float,
               n_iter: int, seed: int) -> np.ndarray:
    """Run exact t-SNE and return the N x 2 embedding."""
    if n_iter < 1:
        raise ValidationError("n_iter must be >= 1")
    if learning_rate <= 0:
        raise ValidationError("learning_rate must be positive")
    n = points.shape[0]
    p = joint_affinities(points, perplexity)
    rng = generator(seed, "tsne-init")
    y = 1e-4 * rng.standard_normal((n, 2))
    update = np.zeros_like(y)
    gains = np.ones_like(y)
    exag_until = min(EXAGGERATION_ITERS, n_iter)
    p_run = p * EARLY_EXAGGERATION

    for it in range(n_iter):
        if it == exag_until:
            p_run = p
        grad = kernels.tsne_grad(y, p_run)
        if not np.isfinite(grad).all():
            raise ProjectionError("NaN in gradient", technique="tsne-exact",
                                  iteration=it)
        momentum = 0.5 if it < EXAGGERATION_ITERS else 0.8
        inc = np.sign(grad) != np.sign(update)
        gains = np.where(inc, gains + 0.2, gains * 0.8)
        np.clip(gains, MIN_GAIN, None, out=gains)
        update = momentum * update - learning_rate * gains * grad
        y = y + update
        y = y - y.mean(axis=0)
        if not np.isfinite(y).all():
            raise ProjectionError("embedding diverged", technique="tsne-exact",
                                  iteration=it)
    return y
