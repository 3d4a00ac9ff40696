"""Empirical influence functions of kernel CCA and influence-based ranking.

The influence of a contaminating pair on the squared j-th canonical
correlation, evaluated at unit-variance variates ``(u, v)`` with
correlation ``rho``, is

    -rho^2 u^2 + 2 rho u v - rho^2 v^2,

which vanishes identically when ``rho = 1`` with matching variates, and
for ``rho = 0``.  Evaluating it at every training pair yields a per-sample
influence profile whose large entries flag observations the fit is most
sensitive to.  For reweighted (robust) fits each sample's value is further
scaled by its relative weight ``n w_i`` in the fitted second moment: the
profile then reports the sensitivity of the weighted functional, which is
exactly what the reweighting bounds.  With uniform weights the factor is
one and the plain formula is recovered.  The influence of the canonical
functions themselves is realized through Gram-matrix algebra on an
orthonormalized feature basis, with every operator inverse regularized by
the fit's ``kappa``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .cca import KernelCCA
from .exceptions import NumericalError


@dataclass
class InfluenceProfile:
    """Per-sample empirical influence values for one canonical component."""

    component: int
    values: np.ndarray
    method: str

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(self.values)):
            raise NumericalError("influence profile contains non-finite values")

    @property
    def n(self):
        return self.values.shape[0]


@dataclass
class CvInfluence:
    """Influence of the canonical functions under contamination at one sample.

    The coefficient vectors represent the influence functions in the span
    of the centered training features; ``x_values``/``y_values`` are their
    evaluations (inner products with the centered features) at the
    training points.
    """

    component: int
    index: int
    x_coefficients: np.ndarray = field(repr=False)
    y_coefficients: np.ndarray = field(repr=False)
    x_values: np.ndarray = field(repr=False)
    y_values: np.ndarray = field(repr=False)


def corr_influence_values(rho, cv_a, cv_b):
    """Pairwise influence formula for the squared canonical correlation."""
    cv_a = np.asarray(cv_a, dtype=float)
    cv_b = np.asarray(cv_b, dtype=float)
    return rho * (2.0 * cv_a * cv_b - rho * (cv_a * cv_a + cv_b * cv_b))


def _check_component(model, component):
    ncomp = model.correlations_.shape[0]
    if not 1 <= component <= ncomp:
        raise ValueError(f"component must be in [1, {ncomp}], got {component}")
    return component - 1


def _relative_weights(model):
    """Each sample's weight in the fitted second moment, relative to 1/n.

    Identically one for square loss (uniform weights); for reweighted fits
    it scales each sample's influence by the attention the weighted
    functional actually pays to it, which is what bounds the sensitivity
    of the robust estimators.
    """
    w = model.joint_sample_weights_.w
    return w.shape[0] * w


def eif_kernel_corr(model, component=1):
    """Influence profile of the squared canonical correlation of a pair fit."""
    j = _check_component(model, component)
    rho = float(model.correlations_[j])
    values = _relative_weights(model) * corr_influence_values(
        rho, model.x_variates_[:, j], model.y_variates_[:, j]
    )
    method = "kernel-cca" if model.loss_spec_.kind == "square" else "robust-kernel-cca"
    return InfluenceProfile(component=component, values=values, method=method)


def eif_linear_cca(X, Y, component=1, kappa=1e-5, n_components=10):
    """Influence profile of linear CCA: the linear-kernel, square-loss fit."""
    model = KernelCCA(
        n_components=n_components, kernel="linear", loss="square", kappa=kappa
    ).fit(X, Y)
    profile = eif_kernel_corr(model, component=component)
    return InfluenceProfile(
        component=component, values=profile.values, method="linear-cca"
    )


def eif_multiple_kernel_corr(model, component=1):
    """Influence profile of a multi-view fit: pairwise formula averaged.

    With two views this equals :func:`eif_kernel_corr` exactly.
    """
    j = _check_component(model, component)
    rho = float(model.correlations_[j])
    m = model.n_views_
    total = np.zeros(model.n_samples_)
    for u in range(m):
        for v in range(u + 1, m):
            total += corr_influence_values(
                rho, model.variates_[u][:, j], model.variates_[v][:, j]
            )
    values = _relative_weights(model) * total / (m * (m - 1) / 2.0)
    return InfluenceProfile(
        component=component, values=values, method="multiple-kernel-cca"
    )


def _feature_coordinates(G, tol=1e-10):
    """Orthonormal feature coordinates of a centered PSD Gram matrix.

    Returns ``(Z, U, lam)`` with ``Z.T @ Z == G`` up to the dropped null
    space; column ``Z[:, i]`` holds the coordinates of the i-th centered
    feature vector.
    """
    vals, U = np.linalg.eigh(0.5 * (G + G.T))
    top = float(vals[-1]) if vals.size else 0.0
    if top <= 0:
        raise NumericalError("Gram matrix has no positive spectrum")
    keep = vals > tol * top
    lam = vals[keep]
    U = U[:, keep]
    Z = np.sqrt(lam)[:, None] * U.T
    return Z, U, lam


def _inv_sqrt_pair(S):
    """(S^{-1/2}, S^{1/2}) of a symmetric positive definite matrix."""
    vals, Q = np.linalg.eigh(0.5 * (S + S.T))
    if vals[0] <= 0:
        raise NumericalError("operator not positive definite")
    root = np.sqrt(vals)
    return (Q / root) @ Q.T, (Q * root) @ Q.T


def _cv_side(rho, f_here, f_other, L, Sigma_cross, S_other, xi_here, xi_other, zeta):
    """One side of the canonical-function influence formula."""
    t1 = L @ xi_here
    t2 = L @ (Sigma_cross @ linalg.solve(S_other, xi_other, assume_a="pos"))
    return (
        -rho * (f_other - rho * f_here) * t1
        - (f_here - rho * f_other) * t2
        + 0.5 * (1.0 - f_here**2) * zeta
    )


def _deflated_resolvent(N, rho2, nu):
    """Inverse of ``N - rho^2 I`` on the complement of direction ``nu``."""
    r = N.shape[0]
    P = np.outer(nu, nu)
    T = N - rho2 * np.eye(r) + P
    return linalg.solve(T, np.eye(r) - P, assume_a="sym")


def eif_canonical_variates(model, component, index):
    """Influence of both canonical functions under contamination at a sample.

    ``index`` selects the training pair acting as the contamination point.
    All operator inverses are regularized by the fit's ``kappa``; the
    resolvent at the j-th eigenvalue is taken on the complement of the
    fitted direction.
    """
    j = _check_component(model, component)
    n = model.n_samples_
    if not 0 <= index < n:
        raise ValueError(f"index must be in [0, {n}), got {index}")
    rho = float(model.correlations_[j])
    w = model.joint_sample_weights_.w
    kappa = model.kappa

    Zx, Ux, lx = _feature_coordinates(model.x_gram_)
    Zy, Uy, ly = _feature_coordinates(model.y_gram_)
    Sxx = (Zx * w) @ Zx.T
    Syy = (Zy * w) @ Zy.T
    Sxy = (Zx * w) @ Zy.T
    Sx = Sxx + kappa * np.eye(Sxx.shape[0])
    Sy = Syy + kappa * np.eye(Syy.shape[0])
    Sx_ih, Sx_h = _inv_sqrt_pair(Sx)
    Sy_ih, Sy_h = _inv_sqrt_pair(Sy)

    zeta_x = Zx @ model.x_coef_[:, j]
    zeta_y = Zy @ model.y_coef_[:, j]
    nu_x = Sx_h @ zeta_x
    nu_x /= np.linalg.norm(nu_x)
    nu_y = Sy_h @ zeta_y
    nu_y /= np.linalg.norm(nu_y)

    cross_x = Sxy @ linalg.solve(Sy, Sxy.T, assume_a="pos")
    Nx = Sx_ih @ cross_x @ Sx_ih
    Nx = 0.5 * (Nx + Nx.T)
    cross_y = Sxy.T @ linalg.solve(Sx, Sxy, assume_a="pos")
    Ny = Sy_ih @ cross_y @ Sy_ih
    Ny = 0.5 * (Ny + Ny.T)

    Lx = Sx_ih @ _deflated_resolvent(Nx, rho**2, nu_x) @ Sx_ih
    Ly = Sy_ih @ _deflated_resolvent(Ny, rho**2, nu_y) @ Sy_ih

    xi_x = Zx[:, index]
    xi_y = Zy[:, index]
    fx = float(model.x_variates_[index, j])
    fy = float(model.y_variates_[index, j])

    gx = _cv_side(rho, fx, fy, Lx, Sxy, Sy, xi_x, xi_y, zeta_x)
    gy = _cv_side(rho, fy, fx, Ly, Sxy.T, Sx, xi_y, xi_x, zeta_y)

    return CvInfluence(
        component=component,
        index=index,
        x_coefficients=Ux @ (gx / np.sqrt(lx)),
        y_coefficients=Uy @ (gy / np.sqrt(ly)),
        x_values=Zx.T @ gx,
        y_values=Zy.T @ gy,
    )


def rank_outliers(profile, top_k):
    """Indices of the ``top_k`` largest influence magnitudes.

    Sorted by decreasing ``|value|`` with ties broken by the lower index.
    Accepts an :class:`InfluenceProfile` or a plain value array.
    """
    values = profile.values if isinstance(profile, InfluenceProfile) else profile
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if n == 0:
        raise ValueError("empty influence profile")
    if not 0 <= top_k <= n:
        raise ValueError(f"top_k must be in [0, {n}], got {top_k}")
    order = np.lexsort((np.arange(n), -np.abs(values)))
    return order[:top_k]
