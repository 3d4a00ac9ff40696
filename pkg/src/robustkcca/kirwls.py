"""Kernelized iteratively reweighted least squares (KIRWLS).

The robust kernel mean of feature vectors is a weighted combination
``sum_i w_i k(., X_i)`` whose weights minimize the mean robust loss of the
feature-space residual norms.  Starting from uniform weights, each
iteration computes residuals through Gram-matrix identities,

    e_i = sqrt(K_ii - 2 (K w)_i + w' K w),

converts them to weights ``w_i ~ phi(e_i)`` and renormalizes onto the
probability simplex.  Iteration stops when the relative change of the mean
loss drops below ``tol``.  The same loop run on the elementwise product of
two centered Gram matrices yields the weights of the robust second-moment
(cross-covariance) estimate, because the product matrix is the Gram matrix
of the paired tensor-product features.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import NumericalError
from .kernels import center_gram, gram_matrix
from .losses import loss_objective, resolve_loss, weight_ratio
from .validation import check_square_matrix

DEFAULT_MAX_ITER = 100
DEFAULT_TOL = 1e-8


@dataclass
class WeightVector:
    """Sample weights on the probability simplex plus convergence metadata."""

    w: np.ndarray
    iterations: int
    converged: bool
    final_objective: float
    objective_history: tuple = field(default=(), repr=False)

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float)

    @property
    def n(self):
        return self.w.shape[0]


def _mean_errors(K, diag, w):
    """Feature-space distances of each sample to the weighted mean."""
    Kw = K @ w
    return np.sqrt(np.maximum(diag - 2.0 * Kw + float(w @ Kw), 0.0))


def _second_moment_errors(M, diag, w):
    """Tensor-feature distances to the weighted second moment (abs-clamped)."""
    Mw = M @ w
    return np.sqrt(np.abs(diag - 2.0 * Mw + float(w @ Mw)))


def _reweight_loop(matrix, error_fn, loss, max_iter, tol):
    n = matrix.shape[0]
    w = np.full(n, 1.0 / n)
    if n == 1:
        return WeightVector(w, 0, True, 0.0, (0.0,))
    diag = np.diag(matrix).copy()

    e = error_fn(matrix, diag, w)
    obj_old = loss_objective(resolve_loss(loss, e), e)
    history = [obj_old]
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        spec = resolve_loss(loss, e)
        phi = np.asarray(weight_ratio(spec, e), dtype=float)
        total = phi.sum()
        if total <= 0:
            raise NumericalError("total weight collapsed")
        w = phi / total
        assert w.min() >= 0 and abs(w.sum() - 1.0) < 1e-12
        e = error_fn(matrix, diag, w)
        obj_new = loss_objective(resolve_loss(loss, e), e)
        history.append(obj_new)
        if obj_old == 0 or abs(obj_old - obj_new) / abs(obj_old) < tol:
            converged = True
            break
        obj_old = obj_new
    return WeightVector(w, iterations, converged, history[-1], tuple(history))


def robust_mean_weights(K, loss, max_iter=DEFAULT_MAX_ITER, tol=DEFAULT_TOL):
    """KIRWLS weights of the robust kernel mean for Gram matrix ``K``.

    Square loss yields uniform weights after a single iteration, so the
    robust path degenerates to ordinary mean centering.
    """
    K = check_square_matrix(K)
    return _reweight_loop(K, _mean_errors, loss, max_iter, tol)


def robust_centered_gram(
    X, loss, kernel="rbf", bandwidth=None, max_iter=DEFAULT_MAX_ITER, tol=DEFAULT_TOL
):
    """Robust-centered Gram matrix of ``X`` and the weights that center it.

    Returns the symmetrized ``C K C.T`` with ``C = I - 1 w^T`` where ``w``
    are the robust kernel mean weights.  With square loss this equals the
    standard doubly-centered Gram matrix.
    """
    K = gram_matrix(X, kernel=kernel, bandwidth=bandwidth)
    wv = robust_mean_weights(K, loss, max_iter=max_iter, tol=tol)
    G = center_gram(K, wv.w)
    return 0.5 * (G + G.T), wv


def robust_cco_weights(*grams, loss, max_iter=DEFAULT_MAX_ITER, tol=DEFAULT_TOL):
    """Joint KIRWLS weights of the robust second moment of paired features.

    Takes one centered Gram matrix per view, all of the same size.  Their
    elementwise product is the Gram matrix of the tensor-product features,
    so the mean-reweighting loop applies verbatim.  Passing the same Gram
    matrix twice reduces to the robust covariance case; with square loss
    the weights are uniform.
    """
    if len(grams) < 2:
        raise ValueError("need at least two Gram matrices")
    grams = [check_square_matrix(G) for G in grams]
    n = grams[0].shape[0]
    if any(G.shape[0] != n for G in grams):
        raise ValueError("all Gram matrices must have the same size")
    M = grams[0].copy()
    for G in grams[1:]:
        M *= G
    return _reweight_loop(M, _second_moment_errors, loss, max_iter, tol)
