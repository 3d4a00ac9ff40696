import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_simplex(rng, n):
    w = rng.uniform(0.1, 1.0, size=n)
    return w / w.sum()


def random_spd(rng, n, scale=1.0):
    A = rng.normal(size=(n, n))
    return A @ A.T + scale * np.eye(n)


def correlated_pair(rng, n, p=3, q=2, noise=0.5):
    """Two views sharing one latent score, for CCA fixtures."""
    z = rng.normal(size=n)
    X = np.column_stack(
        [z + noise * rng.normal(size=n)]
        + [rng.normal(size=n) for _ in range(p - 1)]
    )
    Y = np.column_stack(
        [0.8 * z + noise * rng.normal(size=n)]
        + [rng.normal(size=n) for _ in range(q - 1)]
    )
    return X, Y


def refit_with_weight(model, X, Y, w):
    """Clone-and-refit helper for contamination oracles."""
    from sklearn.base import clone

    return clone(model).fit(X, Y, joint_weight=w)
