"""Synthetic two-view (signal/genotype) and three-view (plus methylation)
generators with controlled contamination.

A shared latent score drives both primary views.  The first view is the
rank-one signal ``mu a^T`` plus Gaussian noise; the second is a genotype
matrix whose correlated markers draw alleles with probability
``logistic(mu - bias)``, ``bias = log(1/maf - 1)``, and whose remaining
markers draw at their minor-allele frequency.  Each genotype entry is the
sum of two Bernoulli draws: the first uses one uniform per sample, the
second (by default) a single uniform shared across samples per marker.
The third view assigns samples to clusters, shifts a random subset of
differentially methylated positions by a fixed effect, and passes the
Gaussian core through an inverse logit before adding noise.

Contamination redraws the latent for a fixed fraction of rows
(decoupling them across views) and regenerates the methylation noise at a
larger scale.  Random draws are consumed from per-stage generators spawned
from one seed, in a fixed documented order, so outputs are reproducible.
"""

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit

from .validation import as_data_matrix, check_paired_rows

# Stage order of the spawned random generators.  Appending stages keeps
# earlier draws (and therefore earlier outputs) unchanged.
_STAGES = (
    "loadings",
    "maf",
    "latent",
    "view_noise",
    "genotype",
    "contamination",
    "methylation",
    "methylation_contamination",
)


@dataclass(frozen=True)
class TwoViewParams:
    """Parameters of the two-view generator."""

    n: int = 300
    n_features: int = 100
    latent_scale: float = 0.5
    noise_scale: float = 1.0
    maf_range: tuple = (0.2, 0.4)
    contamination_rate: float = 0.05
    seed: int = 0
    n_correlated: Optional[int] = None  # markers tied to the latent; None = all
    allele_mode: str = "shared"  # second-allele uniform: 'shared' or 'independent'
    reorder_contaminated: bool = False  # append regenerated rows at the end

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.n_features < 1:
            raise ValueError("n_features must be positive")
        if not 0 <= self.contamination_rate < 1:
            raise ValueError("contamination_rate must be in [0, 1)")
        lo, hi = self.maf_range
        if not 0 < lo <= hi <= 0.5:
            raise ValueError("maf_range must lie within (0, 0.5]")
        if self.n_correlated is not None and not 0 <= self.n_correlated <= self.n_features:
            raise ValueError("n_correlated must be in [0, n_features]")
        if self.allele_mode not in ("shared", "independent"):
            raise ValueError("allele_mode must be 'shared' or 'independent'")


@dataclass(frozen=True)
class ThreeViewParams(TwoViewParams):
    """Two-view parameters plus the clustered methylation view."""

    n_methyl_features: int = 100
    methyl_noise_scale: float = 0.1
    cluster_proportions: tuple = (0.30, 0.30, 0.40)
    dmp_rate: float = 0.2
    methyl_effect: float = 2.5
    outlier_noise_scale: float = 3.0

    def __post_init__(self):
        super().__post_init__()
        props = np.asarray(self.cluster_proportions, dtype=float)
        if props.size < 1 or np.any(props <= 0) or abs(props.sum() - 1.0) > 1e-9:
            raise ValueError("cluster_proportions must be positive and sum to 1")
        if not 0 <= self.dmp_rate <= 1:
            raise ValueError("dmp_rate must be in [0, 1]")


@dataclass
class SynthDataset:
    """Generated views, their pre-contamination copies and bookkeeping."""

    views: list
    clean_views: list
    contaminated_indices: np.ndarray
    seed: Optional[int] = None
    cluster_labels: Optional[np.ndarray] = None

    @property
    def n(self):
        return self.views[0].shape[0]


def _stage_rngs(seed):
    children = np.random.SeedSequence(seed).spawn(len(_STAGES))
    return {name: np.random.default_rng(c) for name, c in zip(_STAGES, children)}


def _latent(z, scale):
    # keep the score bounded away from zero before scaling
    return np.sign(z) * (np.abs(z) + 0.1) * scale


def _genotype_rows(rng, mu, maf, n_correlated, allele_mode):
    """Genotype block in {0,1,2}: one column of draws per marker."""
    n = mu.shape[0]
    geno = np.empty((n, maf.shape[0]))
    for m in range(maf.shape[0]):
        bias = np.log(1.0 / maf[m] - 1.0)
        if m < n_correlated:
            g = expit(mu - bias)
        else:
            g = np.full(n, expit(-bias))
        first = g > rng.uniform(size=n)
        if allele_mode == "shared":
            second = g > rng.uniform()
        else:
            second = g > rng.uniform(size=n)
        geno[:, m] = first.astype(float) + second.astype(float)
    return geno


def _contamination_count(rate, n):
    k = int(np.rint(rate * n))
    if rate > 0 and k < 1:
        warnings.warn(
            "contamination rate selects no rows; returning data unchanged",
            RuntimeWarning,
            stacklevel=3,
        )
    return k


def _reorder(rows_by_view, idx, n):
    """Move rows ``idx`` to the end of every array, preserving other order."""
    keep = np.setdiff1d(np.arange(n), idx)
    perm = np.concatenate([keep, idx])
    return [V[perm] for V in rows_by_view], np.arange(n - idx.size, n)


def gen_two_view(params=TwoViewParams()):
    """Generate the paired signal/genotype dataset with contamination."""
    p = params.n_features
    n = params.n
    ncorr = p if params.n_correlated is None else params.n_correlated
    rngs = _stage_rngs(params.seed)

    a = rngs["loadings"].uniform(size=p)
    maf = rngs["maf"].uniform(params.maf_range[0], params.maf_range[1], size=p)
    mu = _latent(rngs["latent"].normal(size=n), params.latent_scale)
    X = np.outer(mu, a) + params.noise_scale * rngs["view_noise"].normal(size=(n, p))
    Y = _genotype_rows(rngs["genotype"], mu, maf, ncorr, params.allele_mode)
    clean = [X.copy(), Y.copy()]

    idx = np.empty(0, dtype=int)
    k = _contamination_count(params.contamination_rate, n)
    if k >= 1:
        idx, X[:], Y[:] = _decouple_rows(rngs["contamination"], params, X, Y, a, maf, ncorr)
        if params.reorder_contaminated:
            stacked, idx = _reorder([X, Y, *clean], idx, n)
            X, Y = stacked[0], stacked[1]
            clean = stacked[2:]

    return SynthDataset(
        views=[X, Y],
        clean_views=clean,
        contaminated_indices=idx,
        seed=params.seed,
    )


def _decouple_rows(rng, params, X, Y, a, maf, ncorr):
    """Regenerate the selected rows of each view from its own fresh latent.

    Using independent latent draws per view is what breaks the cross-view
    correlation of the contaminated rows; the marginal distribution of
    each view is unchanged.
    """
    n, p = X.shape
    k = int(np.rint(params.contamination_rate * n))
    idx = np.sort(rng.choice(n, size=k, replace=False))
    mu_x = _latent(rng.normal(size=k), params.latent_scale)
    X[idx] = np.outer(mu_x, a) + params.noise_scale * rng.normal(size=(k, p))
    mu_y = _latent(rng.normal(size=k), params.latent_scale)
    Y[idx] = _genotype_rows(rng, mu_y, maf, ncorr, params.allele_mode)
    return idx, X, Y


def gen_three_view(params=ThreeViewParams()):
    """Generate signal, genotype and clustered methylation views.

    The first two views reuse the two-view stages draw-for-draw, so they
    coincide with :func:`gen_two_view` under matching parameters.
    """
    p = params.n_features
    p3 = params.n_methyl_features
    n = params.n
    ncorr = p if params.n_correlated is None else params.n_correlated
    rngs = _stage_rngs(params.seed)

    a = rngs["loadings"].uniform(size=p)
    maf = rngs["maf"].uniform(params.maf_range[0], params.maf_range[1], size=p)
    mu = _latent(rngs["latent"].normal(size=n), params.latent_scale)
    X = np.outer(mu, a) + params.noise_scale * rngs["view_noise"].normal(size=(n, p))
    Y = _genotype_rows(rngs["genotype"], mu, maf, ncorr, params.allele_mode)

    rng_m = rngs["methylation"]
    props = np.asarray(params.cluster_proportions, dtype=float)
    bounds = np.rint(np.cumsum(props) * n).astype(int)
    sizes = np.diff(np.concatenate([[0], bounds]))
    labels = np.repeat(np.arange(props.size), sizes)
    dmp = rng_m.binomial(1, params.dmp_rate, size=(p3, props.size))
    blocks = [
        rng_m.normal(size=(sizes[c], p3)) + dmp[:, c] * params.methyl_effect
        for c in range(props.size)
    ]
    core = np.vstack(blocks)
    Z = expit(core) + params.methyl_noise_scale * rng_m.normal(size=(n, p3))
    clean = [X.copy(), Y.copy(), Z.copy()]

    idx = np.empty(0, dtype=int)
    k = _contamination_count(params.contamination_rate, n)
    if k >= 1:
        idx, X[:], Y[:] = _decouple_rows(rngs["contamination"], params, X, Y, a, maf, ncorr)
        noise = rngs["methylation_contamination"].normal(size=(k, p3))
        Z[idx] = expit(core[idx]) + params.outlier_noise_scale * noise
        if params.reorder_contaminated:
            stacked, idx = _reorder([X, Y, Z, *clean, labels], idx, n)
            X, Y, Z = stacked[:3]
            clean = stacked[3:6]
            labels = stacked[6]

    return SynthDataset(
        views=[X, Y, Z],
        clean_views=clean,
        contaminated_indices=idx,
        seed=params.seed,
        cluster_labels=labels,
    )


def contaminate(views, rate, mode="decouple", seed=0, scale=3.0):
    """Contaminate a fraction of rows of already-generated views.

    ``decouple`` replaces the selected rows of every view after the first
    by rows resampled from the unselected rows of the same view, breaking
    the cross-view pairing while preserving marginals.  ``noise_scale``
    scales the selected rows' residuals about the column means by
    ``scale`` in every view.  Unselected rows are returned bit-identical.
    """
    if not 0 < rate < 1:
        raise ValueError("rate must be in (0, 1)")
    if mode not in ("decouple", "noise_scale"):
        raise ValueError(f"unknown contamination mode {mode!r}")
    views = [as_data_matrix(V, name=f"view {i}") for i, V in enumerate(views)]
    if mode == "decouple" and len(views) < 2:
        raise ValueError("decouple mode needs at least two views")
    n = check_paired_rows(*views)
    clean = [V.copy() for V in views]
    out = [V.copy() for V in views]

    k = _contamination_count(rate, n)
    if k < 1:
        return SynthDataset(out, clean, np.empty(0, dtype=int), seed=seed)

    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(n, size=k, replace=False))
    if mode == "decouple":
        complement = np.setdiff1d(np.arange(n), idx)
        for v in range(1, len(out)):
            donors = rng.choice(complement, size=k, replace=True)
            out[v][idx] = clean[v][donors]
    else:
        for v, V in enumerate(out):
            center = clean[v].mean(axis=0)
            V[idx] = center + scale * (clean[v][idx] - center)
    return SynthDataset(out, clean, idx, seed=seed)
