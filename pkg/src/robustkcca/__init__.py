"""Robust kernel CCA and supporting robust kernel statistics.

The package provides kernel Gram-matrix utilities, robust loss families,
kernelized iteratively reweighted least squares for robust kernel means
and second moments, standard/robust/multi-view kernel canonical
correlation analysis, empirical influence functions for outlier scoring,
and synthetic multi-view generators with controlled contamination.
"""

from .cca import KernelCCA, MultiviewKernelCCA, solve_cca_pencil
from .exceptions import DataValidationError, NumericalError
from .geneig import GenEigResult, sym_gen_eig
from .influence import (
    CvInfluence,
    InfluenceProfile,
    corr_influence_values,
    eif_canonical_variates,
    eif_kernel_corr,
    eif_linear_cca,
    eif_multiple_kernel_corr,
    rank_outliers,
)
from .kernels import (
    center_gram,
    center_gram_test,
    cross_gram,
    gram_matrix,
    median_bandwidth,
    resolve_bandwidth,
)
from .kirwls import (
    WeightVector,
    robust_cco_weights,
    robust_centered_gram,
    robust_mean_weights,
)
from .losses import (
    LossSpec,
    loss_objective,
    loss_value,
    make_loss,
    tune_loss,
    weight_ratio,
)
from .simulate import (
    SynthDataset,
    ThreeViewParams,
    TwoViewParams,
    contaminate,
    gen_three_view,
    gen_two_view,
)

__version__ = "0.1.0"

__all__ = [
    "KernelCCA",
    "MultiviewKernelCCA",
    "solve_cca_pencil",
    "DataValidationError",
    "NumericalError",
    "GenEigResult",
    "sym_gen_eig",
    "CvInfluence",
    "InfluenceProfile",
    "corr_influence_values",
    "eif_canonical_variates",
    "eif_kernel_corr",
    "eif_linear_cca",
    "eif_multiple_kernel_corr",
    "rank_outliers",
    "center_gram",
    "center_gram_test",
    "cross_gram",
    "gram_matrix",
    "median_bandwidth",
    "resolve_bandwidth",
    "WeightVector",
    "robust_cco_weights",
    "robust_centered_gram",
    "robust_mean_weights",
    "LossSpec",
    "loss_objective",
    "loss_value",
    "make_loss",
    "tune_loss",
    "weight_ratio",
    "SynthDataset",
    "ThreeViewParams",
    "TwoViewParams",
    "contaminate",
    "gen_three_view",
    "gen_two_view",
]
