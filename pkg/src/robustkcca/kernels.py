"""Kernel evaluation, Gram matrices, bandwidth selection and centering.

Three kernels are supported:

* ``linear``: plain inner products ``X @ X.T``.
* ``rbf``: Gaussian ``exp(-||x - x'||^2 / (2 s^2))``.  When no bandwidth is
  given, ``s`` is the square root of the median of the nonzero squared
  pairwise distances (median heuristic).
* ``ibs``: identity-by-state similarity for genotype matrices coded
  {0, 1, 2}: ``K_ij = 1 - mean(|x_i - x_j|) / 2``, bounded in [0, 1].

Centering supports arbitrary simplex weights so that the same code path
serves both uniform and robust (reweighted) mean removal.
"""

import numpy as np
from scipy.spatial.distance import cdist

from .exceptions import DataValidationError
from .validation import (
    as_data_matrix,
    check_genotype_matrix,
    check_simplex_weights,
    check_square_matrix,
)

KERNEL_KINDS = ("linear", "rbf", "ibs")


def _squared_distances(X, Z=None):
    """Pairwise squared Euclidean distances, clamped at zero."""
    Z = X if Z is None else Z
    sq_x = np.sum(X * X, axis=1)
    sq_z = np.sum(Z * Z, axis=1)
    d2 = sq_x[:, None] + sq_z[None, :] - 2.0 * (X @ Z.T)
    return np.maximum(d2, 0.0)


def median_bandwidth(X):
    """Median-heuristic bandwidth: sqrt of the median nonzero squared distance.

    The median is taken over the full off-diagonal distance matrix (each
    unordered pair counted twice) with exact zeros excluded.
    """
    X = as_data_matrix(X, min_rows=2)
    d2 = _squared_distances(X)
    np.fill_diagonal(d2, 0.0)
    off = d2[~np.eye(d2.shape[0], dtype=bool)]
    nonzero = off[off != 0]
    if nonzero.size == 0:
        raise DataValidationError("degenerate data: zero median distance")
    return float(np.sqrt(np.median(nonzero)))


def resolve_bandwidth(X, kernel, bandwidth=None):
    """Concrete bandwidth for ``kernel``; the median heuristic fills in None."""
    if kernel != "rbf":
        return None
    if bandwidth is not None:
        if bandwidth <= 0:
            raise DataValidationError("bandwidth must be positive")
        return float(bandwidth)
    return median_bandwidth(X)


def cross_gram(X, Z, kernel="rbf", bandwidth=None):
    """Kernel evaluations between the rows of ``X`` and the rows of ``Z``.

    For ``rbf`` the bandwidth must already be resolved (pass the training
    bandwidth when evaluating test points).
    """
    if kernel not in KERNEL_KINDS:
        raise DataValidationError(f"unknown kernel kind {kernel!r}")
    X = as_data_matrix(X, name="X")
    Z = as_data_matrix(Z, name="Z")
    if X.shape[1] != Z.shape[1]:
        raise DataValidationError(
            f"feature dimensions differ: {X.shape[1]} vs {Z.shape[1]}"
        )
    if kernel == "linear":
        return X @ Z.T
    if kernel == "ibs":
        check_genotype_matrix(X, name="X")
        check_genotype_matrix(Z, name="Z")
        p = X.shape[1]
        return 1.0 - cdist(X, Z, metric="cityblock") / (2.0 * p)
    s = resolve_bandwidth(X, "rbf", bandwidth)
    return np.exp(-_squared_distances(X, Z) / (2.0 * s * s))


def gram_matrix(X, kernel="rbf", bandwidth=None):
    """Symmetric Gram matrix of ``X``, symmetrized as ``(K + K.T) / 2``."""
    X = as_data_matrix(X, name="X", min_rows=1)
    K = cross_gram(X, X, kernel=kernel, bandwidth=bandwidth)
    return 0.5 * (K + K.T)


def center_gram(K, w=None):
    """Weighted double centering ``C K C.T`` with ``C = I - 1 w^T``.

    With uniform weights this is the usual centered Gram matrix; with the
    weights of a robust kernel mean it removes that mean instead.  The
    weighted row and column means of the result vanish: ``w @ G = 0`` and
    ``G @ w = 0``.
    """
    K = check_square_matrix(K)
    n = K.shape[0]
    if w is None:
        w = np.full(n, 1.0 / n)
    w = check_simplex_weights(w, n)
    C = np.eye(n) - np.outer(np.ones(n), w)
    return C @ K @ C.T


def center_gram_test(K_test, K, w=None):
    """Center test-point kernel rows against the (weighted) training mean.

    ``K_test`` holds kernel evaluations between test and training points
    (shape t-by-n) and ``K`` the training Gram matrix.  When the test points
    are the training points this reproduces :func:`center_gram`.
    """
    K = check_square_matrix(K)
    K_test = np.asarray(K_test, dtype=float)
    if K_test.ndim != 2 or K_test.shape[1] != K.shape[0]:
        raise DataValidationError(
            f"K_test must have {K.shape[0]} columns, got shape {K_test.shape}"
        )
    n = K.shape[0]
    if w is None:
        w = np.full(n, 1.0 / n)
    w = check_simplex_weights(w, n)
    wK = w @ K
    return K_test - wK[None, :] - (K_test @ w)[:, None] + float(w @ K @ w)
