"""Standard, robust and multi-view kernel canonical correlation analysis.

All variants share one construction.  Each view's Gram matrix is centered
with the weights of its robust kernel mean, a joint weight vector is
derived from the robust second-moment estimate of the paired features, and
the canonical directions solve the symmetric-definite pencil

    A = [[0,        G_x W G_y],          B = blockdiag(S_x, S_y)
         [G_y W G_x, 0       ]],

with ``W = diag(w_joint)``.  Two constraint blocks are supported:
``"variance"`` uses ``S = G W G + kappa G + 1e-6 I`` (weighted variance
plus a norm penalty) and ``"ridge"`` uses ``S = G + (kappa + 1e-6) I``.
For ``m > 2`` views, every off-diagonal block ``G_i W G_j`` is filled in
(sum-of-correlations multiset CCA) and the reported correlations are the
eigenvalues divided by ``m - 1`` so identical views score 1.  Square loss
makes every weight vector uniform and recovers standard kernel CCA.
"""

import numpy as np
from sklearn.base import BaseEstimator

from .geneig import sym_gen_eig
from .kernels import (
    center_gram,
    center_gram_test,
    cross_gram,
    gram_matrix,
    resolve_bandwidth,
)
from .kirwls import WeightVector, robust_cco_weights, robust_mean_weights
from .losses import LossSpec
from .validation import as_data_matrix, check_paired_rows, check_simplex_weights

RIDGE = 1e-6

CONSTRAINT_MODES = ("variance", "ridge")


def _as_loss_spec(loss, loss_params):
    if isinstance(loss, LossSpec):
        return loss
    return LossSpec(kind=loss, **(loss_params or {}))


def solve_cca_pencil(grams, w, kappa, n_components, constraint="variance"):
    """Solve the multi-view CCA pencil for given joint weights.

    Returns the raw top eigenvalues and the per-view coefficient blocks of
    the corresponding eigenvectors (one n-by-ncomp array per view).
    """
    m = len(grams)
    n = grams[0].shape[0]
    if constraint not in CONSTRAINT_MODES:
        raise ValueError(f"unknown constraint mode {constraint!r}")
    w = check_simplex_weights(np.asarray(w, dtype=float), n, name="joint weights")

    WG = [w[:, None] * G for G in grams]
    A = np.zeros((m * n, m * n))
    B = np.zeros((m * n, m * n))
    for i in range(m):
        si, ei = i * n, (i + 1) * n
        if constraint == "variance":
            S = grams[i] @ WG[i] + kappa * grams[i] + RIDGE * np.eye(n)
        else:
            S = grams[i] + (kappa + RIDGE) * np.eye(n)
        B[si:ei, si:ei] = 0.5 * (S + S.T)
        for j in range(i + 1, m):
            sj, ej = j * n, (j + 1) * n
            block = grams[i] @ WG[j]
            A[si:ei, sj:ej] = block
            A[sj:ej, si:ei] = block.T

    res = sym_gen_eig(A, B, ncomp=n_components)
    coefs = [res.vectors[i * n : (i + 1) * n, :].copy() for i in range(m)]
    return res.values, coefs


def _normalize_views(grams, w, coefs, tol=1e-12):
    """Scale coefficients so the variates have unit weighted variance.

    Signs are fixed deterministically: the first view's leading coefficient
    is positive and every other view is flipped, if needed, so its variate
    correlates nonnegatively with the first view's.
    """
    variates = []
    for v, (G, a) in enumerate(zip(grams, coefs)):
        cv = G @ a
        scale = np.sqrt(np.maximum(np.einsum("i,ij->j", w, cv**2), tol))
        a /= scale[None, :]
        cv /= scale[None, :]
        for j in range(a.shape[1]):
            if v == 0:
                col = a[:, j]
                big = np.max(np.abs(col))
                nz = np.flatnonzero(np.abs(col) > 1e-12 * big) if big else []
                flip = len(nz) > 0 and col[nz[0]] < 0
            else:
                flip = float(w @ (variates[0][:, j] * cv[:, j])) < 0
            if flip:
                a[:, j] = -a[:, j]
                cv[:, j] = -cv[:, j]
        variates.append(cv)
    return coefs, variates


def _fit_views(
    views,
    *,
    kernel,
    bandwidth,
    loss_spec,
    kappa,
    n_components,
    constraint,
    max_iter,
    tol,
    joint_weight=None,
):
    """Shared fitting routine behind both estimators."""
    views = [as_data_matrix(V, name=f"view {i}", min_rows=2) for i, V in enumerate(views)]
    n = check_paired_rows(*views)
    m = len(views)
    if not 1 <= n_components <= n:
        raise ValueError(f"n_components must be in [1, {n}], got {n_components}")
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")

    bandwidths, grams_raw, grams, mean_weights = [], [], [], []
    for V in views:
        bw = resolve_bandwidth(V, kernel, bandwidth)
        K = gram_matrix(V, kernel=kernel, bandwidth=bw)
        wv = robust_mean_weights(K, loss_spec, max_iter=max_iter, tol=tol)
        G = center_gram(K, wv.w)
        bandwidths.append(bw)
        grams_raw.append(K)
        grams.append(0.5 * (G + G.T))
        mean_weights.append(wv)

    if joint_weight is not None:
        w = check_simplex_weights(np.asarray(joint_weight, dtype=float), n,
                                  name="joint_weight")
        joint = WeightVector(w, 0, True, float("nan"))
    else:
        joint = robust_cco_weights(*grams, loss=loss_spec, max_iter=max_iter, tol=tol)

    values, coefs = solve_cca_pencil(
        grams, joint.w, kappa, n_components, constraint=constraint
    )
    coefs, variates = _normalize_views(grams, joint.w, coefs)
    kcor = np.clip(np.abs(values) / (m - 1), 0.0, 1.0)
    return {
        "views": views,
        "n": n,
        "bandwidths": bandwidths,
        "grams_raw": grams_raw,
        "grams": grams,
        "mean_weights": mean_weights,
        "joint_weights": joint,
        "eigenvalues": values,
        "correlations": kcor,
        "coefs": coefs,
        "variates": variates,
    }


def _transform_view(model_view, X_new):
    """Canonical variates of new points for one fitted view."""
    V, K_raw, w, coef, kernel, bw = model_view
    K_test = cross_gram(as_data_matrix(X_new), V, kernel=kernel, bandwidth=bw)
    return center_gram_test(K_test, K_raw, w) @ coef


class KernelCCA(BaseEstimator):
    """Kernel canonical correlation analysis with optional robust weighting.

    Parameters
    ----------
    n_components : int, default=10
        Number of canonical components to extract.
    kernel : {'linear', 'rbf', 'ibs'}, default='rbf'
        Kernel applied to both views.
    bandwidth : float, optional
        RBF bandwidth ``s``.  ``None`` selects the median heuristic
        separately per view.
    loss : {'square', 'huber', 'hampel', 'tukey'} or LossSpec, default='huber'
        Loss driving the reweighting.  ``'square'`` reproduces standard
        kernel CCA exactly (uniform weights).
    loss_params : dict, optional
        Explicit tuning constants (``c`` or ``c1``/``c2``/``c3``).  Left
        unset, constants are re-tuned from the errors at every iteration.
    kappa : float, default=1e-5
        Regularization strength of the constraint blocks.
    constraint : {'variance', 'ridge'}, default='variance'
        Normalization of the constraint blocks; see the module docstring.
    max_iter : int, default=100
        Maximum reweighting iterations.
    tol : float, default=1e-8
        Relative objective-change tolerance of the reweighting loops.

    Attributes
    ----------
    correlations_ : ndarray of shape (n_components,)
        Canonical correlations in [0, 1], nonincreasing.
    x_coef_, y_coef_ : ndarray of shape (n_samples, n_components)
        Coefficients of the canonical functions in the span of the
        centered training features.
    x_variates_, y_variates_ : ndarray of shape (n_samples, n_components)
        Canonical variates at the training points, unit weighted variance.
    x_gram_, y_gram_ : ndarray
        Robust-centered Gram matrices used in the pencil.
    x_sample_weights_, y_sample_weights_, joint_sample_weights_ : WeightVector
        Per-view mean weights and the joint second-moment weights.

    Examples
    --------
    >>> import numpy as np
    >>> rng = np.random.default_rng(0)
    >>> X = rng.normal(size=(40, 3))
    >>> Y = X @ rng.normal(size=(3, 3)) + 0.01 * rng.normal(size=(40, 3))
    >>> model = KernelCCA(n_components=2, kernel="linear", loss="square").fit(X, Y)
    >>> bool(model.correlations_[0] > 0.99)
    True
    """

    def __init__(
        self,
        n_components=10,
        kernel="rbf",
        bandwidth=None,
        loss="huber",
        loss_params=None,
        kappa=1e-5,
        constraint="variance",
        max_iter=100,
        tol=1e-8,
    ):
        self.n_components = n_components
        self.kernel = kernel
        self.bandwidth = bandwidth
        self.loss = loss
        self.loss_params = loss_params
        self.kappa = kappa
        self.constraint = constraint
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, Y, joint_weight=None):
        """Fit on two paired views.

        ``joint_weight`` overrides the joint sample weights (a probability
        vector) instead of deriving them by reweighting; the per-view
        centering weights are still computed from the loss.
        """
        loss_spec = _as_loss_spec(self.loss, self.loss_params)
        fitted = _fit_views(
            [X, Y],
            kernel=self.kernel,
            bandwidth=self.bandwidth,
            loss_spec=loss_spec,
            kappa=self.kappa,
            n_components=self.n_components,
            constraint=self.constraint,
            max_iter=self.max_iter,
            tol=self.tol,
            joint_weight=joint_weight,
        )
        self.loss_spec_ = loss_spec
        self.n_samples_ = fitted["n"]
        self.x_fit_, self.y_fit_ = fitted["views"]
        self.x_bandwidth_, self.y_bandwidth_ = fitted["bandwidths"]
        self.x_gram_raw_, self.y_gram_raw_ = fitted["grams_raw"]
        self.x_gram_, self.y_gram_ = fitted["grams"]
        self.x_sample_weights_, self.y_sample_weights_ = fitted["mean_weights"]
        self.joint_sample_weights_ = fitted["joint_weights"]
        self.eigenvalues_ = fitted["eigenvalues"]
        self.correlations_ = fitted["correlations"]
        self.x_coef_, self.y_coef_ = fitted["coefs"]
        self.x_variates_, self.y_variates_ = fitted["variates"]
        return self

    def transform(self, X, Y):
        """Canonical variates of new paired points, training normalization."""
        cv_x = _transform_view(
            (self.x_fit_, self.x_gram_raw_, self.x_sample_weights_.w,
             self.x_coef_, self.kernel, self.x_bandwidth_),
            X,
        )
        cv_y = _transform_view(
            (self.y_fit_, self.y_gram_raw_, self.y_sample_weights_.w,
             self.y_coef_, self.kernel, self.y_bandwidth_),
            Y,
        )
        return cv_x, cv_y

    def fit_transform(self, X, Y):
        self.fit(X, Y)
        return self.x_variates_, self.y_variates_


class MultiviewKernelCCA(BaseEstimator):
    """Sum-of-correlations kernel CCA over two or more views.

    Shares every parameter with :class:`KernelCCA`; ``fit`` takes a list
    of views instead of a pair.  With exactly two views the fitted
    correlations coincide with :class:`KernelCCA` on the same data.

    Attributes
    ----------
    correlations_ : ndarray of shape (n_components,)
        Eigenvalues scaled by ``1 / (n_views - 1)`` and clipped to [0, 1].
    coefs_, variates_, grams_, sample_weights_ : lists, one entry per view.
    """

    def __init__(
        self,
        n_components=10,
        kernel="rbf",
        bandwidth=None,
        loss="huber",
        loss_params=None,
        kappa=1e-5,
        constraint="variance",
        max_iter=100,
        tol=1e-8,
    ):
        self.n_components = n_components
        self.kernel = kernel
        self.bandwidth = bandwidth
        self.loss = loss
        self.loss_params = loss_params
        self.kappa = kappa
        self.constraint = constraint
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, Xs, joint_weight=None):
        """Fit on a sequence of two or more row-aligned views."""
        if len(Xs) < 2:
            raise ValueError("need at least two views")
        loss_spec = _as_loss_spec(self.loss, self.loss_params)
        fitted = _fit_views(
            list(Xs),
            kernel=self.kernel,
            bandwidth=self.bandwidth,
            loss_spec=loss_spec,
            kappa=self.kappa,
            n_components=self.n_components,
            constraint=self.constraint,
            max_iter=self.max_iter,
            tol=self.tol,
            joint_weight=joint_weight,
        )
        self.loss_spec_ = loss_spec
        self.n_views_ = len(fitted["views"])
        self.n_samples_ = fitted["n"]
        self.views_fit_ = fitted["views"]
        self.bandwidths_ = fitted["bandwidths"]
        self.grams_raw_ = fitted["grams_raw"]
        self.grams_ = fitted["grams"]
        self.sample_weights_ = fitted["mean_weights"]
        self.joint_sample_weights_ = fitted["joint_weights"]
        self.eigenvalues_ = fitted["eigenvalues"]
        self.correlations_ = fitted["correlations"]
        self.coefs_ = fitted["coefs"]
        self.variates_ = fitted["variates"]
        return self

    def transform(self, Xs):
        """Canonical variates of new points, one array per view."""
        if len(Xs) != self.n_views_:
            raise ValueError(f"expected {self.n_views_} views, got {len(Xs)}")
        out = []
        for v, X_new in enumerate(Xs):
            out.append(
                _transform_view(
                    (self.views_fit_[v], self.grams_raw_[v],
                     self.sample_weights_[v].w, self.coefs_[v],
                     self.kernel, self.bandwidths_[v]),
                    X_new,
                )
            )
        return out
