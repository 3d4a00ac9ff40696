"""Symmetric-definite generalized eigensolver ``A v = lambda B v``.

The pencil is reduced with a Cholesky factor of ``B`` rather than an
explicit inverse: with ``B = L L^T`` the problem becomes an ordinary
symmetric eigenproblem for ``L^{-1} A L^{-T}``, and eigenvectors map back
through ``L^{-T}``.  Vectors come out B-normalized (``v^T B v = 1``) and
with a deterministic sign (first nonzero coordinate positive).
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .exceptions import NumericalError
from .validation import check_square_matrix


@dataclass
class GenEigResult:
    """Top eigenpairs of a symmetric-definite pencil, sorted descending."""

    values: np.ndarray
    vectors: np.ndarray
    b_norm: bool = True


def _fix_signs(V, tol=1e-12):
    """Flip columns so the first coordinate above noise level is positive."""
    V = V.copy()
    for j in range(V.shape[1]):
        col = V[:, j]
        scale = np.max(np.abs(col))
        if scale == 0:
            continue
        nz = np.flatnonzero(np.abs(col) > tol * scale)
        if nz.size and col[nz[0]] < 0:
            V[:, j] = -col
    return V


def sym_gen_eig(A, B, ncomp=None):
    """Top ``ncomp`` eigenpairs of the pencil ``A v = lambda B v``.

    ``A`` is symmetrized first; ``B`` must be positive definite, possibly
    after a single jitter of ``1e-6 * trace(B) / n`` on the diagonal.
    """
    A = check_square_matrix(A, name="A")
    B = check_square_matrix(B, name="B")
    n = A.shape[0]
    if B.shape[0] != n:
        raise ValueError(f"A and B sizes differ: {n} vs {B.shape[0]}")
    if ncomp is None:
        ncomp = n
    if not 1 <= ncomp <= n:
        raise ValueError(f"ncomp must be in [1, {n}], got {ncomp}")

    A = 0.5 * (A + A.T)
    B = 0.5 * (B + B.T)
    try:
        L = linalg.cholesky(B, lower=True)
    except linalg.LinAlgError:
        jitter = 1e-6 * np.trace(B) / n
        try:
            L = linalg.cholesky(B + jitter * np.eye(n), lower=True)
        except linalg.LinAlgError as exc:
            raise NumericalError("constraint matrix singular") from exc

    T = linalg.solve_triangular(L, A, lower=True)
    C = linalg.solve_triangular(L, T.T, lower=True)
    C = 0.5 * (C + C.T)
    vals, U = linalg.eigh(C)

    order = np.argsort(vals)[::-1][:ncomp]
    vals = vals[order]
    V = linalg.solve_triangular(L.T, U[:, order], lower=False)
    return GenEigResult(values=vals, vectors=_fix_signs(V), b_norm=True)
