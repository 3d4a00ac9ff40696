"""Input validation helpers used by the estimators and the functional API."""

import numpy as np

from .exceptions import DataValidationError

GENOTYPE_VALUES = (0.0, 1.0, 2.0)


def as_data_matrix(X, name="X", min_rows=1):
    """Coerce ``X`` to a 2-D float64 array of samples-by-features.

    Raises
    ------
    DataValidationError
        If the array is not 2-D, has fewer than ``min_rows`` rows, no
        columns, or contains non-finite entries.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise DataValidationError(f"{name} must be 2-D, got ndim={X.ndim}")
    if X.shape[0] < min_rows:
        raise DataValidationError(
            f"{name} needs at least {min_rows} rows, got {X.shape[0]}"
        )
    if X.shape[1] < 1:
        raise DataValidationError(f"{name} needs at least one column")
    if not np.all(np.isfinite(X)):
        raise DataValidationError(f"{name} contains non-finite entries")
    return X


def check_genotype_matrix(X, name="X"):
    """Check that every entry of ``X`` is one of the genotype codes 0, 1, 2."""
    if not np.isin(X, GENOTYPE_VALUES).all():
        raise DataValidationError(
            f"{name} must contain only genotype entries 0, 1 or 2"
        )
    return X


def check_paired_rows(*arrays, names=None):
    """Check that all arrays share the same number of rows."""
    counts = [a.shape[0] for a in arrays]
    if len(set(counts)) > 1:
        names = names or [f"view {i}" for i in range(len(arrays))]
        detail = ", ".join(f"{n}: {c}" for n, c in zip(names, counts))
        raise DataValidationError(f"row counts differ across views ({detail})")
    return counts[0]


def check_square_matrix(K, name="K"):
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise DataValidationError(f"{name} must be a square matrix, got {K.shape}")
    return K


def check_simplex_weights(w, n, name="w", atol=1e-8):
    """Check that ``w`` is a length-``n`` probability vector."""
    w = np.asarray(w, dtype=float)
    if w.shape != (n,):
        raise DataValidationError(
            f"{name} must have shape ({n},), got {w.shape}"
        )
    if np.any(w < -atol):
        raise DataValidationError(f"{name} has negative entries")
    if abs(w.sum() - 1.0) > atol:
        raise DataValidationError(f"{name} must sum to 1, got {w.sum()!r}")
    return w
