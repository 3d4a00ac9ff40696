"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Fixtures are seed-pinned; stated runtime budgets are asserted.
"""

import contextlib
import filecmp
import time

import numpy as np
from numpy.testing import assert_allclose

import robustkcca as rk
from robustkcca.cli import main as cli_main
from robustkcca.influence import corr_influence_values
from robustkcca.losses import LossSpec, loss_value, weight_ratio

from conftest import refit_with_weight
from test_cca import linear_cca_oracle
from test_geneig import dense_reduction_oracle
from test_kirwls import input_space_robust_mean


@contextlib.contextmanager
def criterion(number, description, budget_seconds):
    start = time.monotonic()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number} FAIL - {description}")
        raise
    elapsed = time.monotonic() - start
    assert elapsed < budget_seconds, (
        f"criterion {number} took {elapsed:.2f}s (budget {budget_seconds}s)"
    )
    print(f"ACCEPTANCE {number} PASS - {description} ({elapsed:.2f}s)")


def test_criterion_1_loss_identities():
    specs = [
        LossSpec("square"),
        LossSpec("huber", c=2.0),
        LossSpec("hampel", c1=1.0, c2=2.0, c3=4.0),
        LossSpec("tukey", c=1.5),
    ]
    with criterion(1, "loss identities on 1000-point grids", 1.0):
        for spec in specs:
            scale = spec.c or getattr(spec, "c3", None) or 1.0
            if spec.kind == "huber" or spec.kind == "tukey":
                bps = [spec.c]
            elif spec.kind == "hampel":
                bps = [spec.c1, spec.c2, spec.c3]
            else:
                bps = []
            # continuity at breakpoints
            for b in bps:
                jump = abs(loss_value(spec, b - 1e-13) - loss_value(spec, b + 1e-13))
                assert jump < 1e-12
            # finite-difference derivative vs t * phi(t)
            h = 1e-5 * max(scale, 1.0)
            grid = np.linspace(h, 10 * scale, 1000)
            if bps:
                near = np.min(np.abs(grid[:, None] - np.array(bps)), axis=1)
                grid = grid[near > 2 * h]
            fd = (loss_value(spec, grid + h) - loss_value(spec, grid - h)) / (2 * h)
            assert np.allclose(fd, grid * weight_ratio(spec, grid),
                               rtol=1e-6, atol=1e-9)
            # phi bounded by its value at zero
            phi = weight_ratio(spec, np.linspace(0, 10 * scale, 1000))
            assert phi.max() <= weight_ratio(spec, 0.0) + 1e-12


def test_criterion_2_square_loss_reduction():
    rng = np.random.default_rng(2024)
    with criterion(2, "square loss reduces to uniform centering bit-for-bit", 5.0):
        for trial in range(20):
            n = int(rng.integers(5, 51))
            if trial % 3 == 2:
                X = rng.integers(0, 3, size=(n, 8)).astype(float)
                kernel = "ibs"
            else:
                X = rng.normal(size=(n, 4))
                kernel = "linear" if trial % 3 == 0 else "rbf"
            G, wv = rk.robust_centered_gram(X, LossSpec("square"), kernel=kernel)
            assert np.array_equal(wv.w, np.full(n, 1.0 / n))
            K = rk.gram_matrix(X, kernel=kernel)
            standard = rk.center_gram(K, np.full(n, 1.0 / n))
            standard = 0.5 * (standard + standard.T)
            assert np.array_equal(G, standard)


def test_criterion_3_kirwls_robustness():
    rng = np.random.default_rng(99)
    with criterion(3, "huber KIRWLS downweights outliers, matches direct IRLS", 5.0):
        X = rng.normal(size=(100, 5))
        X[:5] = 40.0 * rng.normal(size=(5, 5)) + 60.0
        K = rk.gram_matrix(X, kernel="linear")
        wv = rk.robust_mean_weights(K, LossSpec("huber"), max_iter=500, tol=1e-13)
        assert np.all(wv.w[:5] < 1.0 / 100)
        oracle_mean, _ = input_space_robust_mean(X)
        assert np.linalg.norm(wv.w @ X - oracle_mean) < 1e-6


def test_criterion_4_generalized_eigensolver():
    rng = np.random.default_rng(7)
    with criterion(4, "pencil eigensolver matches dense oracle", 5.0):
        for _ in range(50):
            n = int(rng.integers(2, 21))
            A = rng.normal(size=(n, n))
            A = A + A.T
            B = rng.normal(size=(n, n))
            B = B @ B.T + np.eye(n)
            res = rk.sym_gen_eig(A, B, ncomp=n)
            assert_allclose(res.values, dense_reduction_oracle(A, B), atol=1e-8)
            norm_a = np.linalg.norm(A)
            for k in range(n):
                resid = A @ res.vectors[:, k] - res.values[k] * (B @ res.vectors[:, k])
                assert np.linalg.norm(resid) <= 1e-6 * norm_a
            C = rng.normal(size=(n, n)) + 2 * np.eye(n)
            congruent = rk.sym_gen_eig(C.T @ A @ C, C.T @ B @ C, ncomp=n)
            assert_allclose(congruent.values, res.values, atol=1e-7)


def test_criterion_5_kernel_cca_sanity():
    with criterion(5, "kernel CCA self/oracle/invariance sanity", 10.0):
        rng = np.random.default_rng(1)
        X = 5.0 * rng.normal(size=(100, 3))
        self_fit = rk.KernelCCA(n_components=2, kernel="linear",
                                loss="square").fit(X, X)
        assert abs(self_fit.correlations_[0] - 1.0) <= 1e-6

        rng42 = np.random.default_rng(42)
        U = rng42.normal(size=(200, 3))
        V = rng42.normal(size=(200, 3))
        fit = rk.KernelCCA(n_components=3, kernel="linear", loss="square",
                           kappa=1e-5).fit(U, V)
        assert abs(fit.correlations_[0] - linear_cca_oracle(U, V)[0]) <= 0.05

        z = rng.normal(size=50)
        P = np.column_stack([z + 0.3 * rng.normal(size=50), rng.normal(size=50)])
        Q = np.column_stack([z + 0.3 * rng.normal(size=50), rng.normal(size=50)])
        ab = rk.KernelCCA(n_components=2, kernel="rbf", loss="square").fit(P, Q)
        ba = rk.KernelCCA(n_components=2, kernel="rbf", loss="square").fit(Q, P)
        assert np.abs(ab.correlations_ - ba.correlations_).max() <= 1e-9
        perm = rng.permutation(50)
        pp = rk.KernelCCA(n_components=2, kernel="rbf", loss="square").fit(
            P[perm], Q[perm]
        )
        assert np.abs(pp.correlations_ - ab.correlations_).max() <= 1e-9


def test_criterion_6_eif_against_contamination_oracle():
    with criterion(6, "influence formula matches contamination derivative", 30.0):
        rng = np.random.default_rng(7)
        n, eps = 20, 1e-4
        z = rng.normal(size=n)
        X = np.column_stack([z + 0.5 * rng.normal(size=n),
                             rng.normal(size=n),
                             0.3 * z + rng.normal(size=n)])
        Y = np.column_stack([z + 0.6 * rng.normal(size=n), rng.normal(size=n)])
        model = rk.KernelCCA(n_components=3, kernel="linear",
                             loss="square").fit(X, Y)
        profile = rk.eif_kernel_corr(model, component=1)
        w0 = model.joint_sample_weights_.w
        rho2 = model.correlations_[0] ** 2
        fd = np.empty(n)
        for i in range(n):
            w = (1 - eps) * w0
            w[i] += eps
            refit = refit_with_weight(model, X, Y, w)
            fd[i] = (refit.correlations_[0] ** 2 - rho2) / eps
        assert np.corrcoef(profile.values, fd)[0, 1] > 0.95

        cv = rng.normal(size=40)
        assert np.all(corr_influence_values(1.0, cv, cv) == 0.0)
        u, v = rng.normal(size=(2, 40))
        assert np.all(corr_influence_values(0.0, u, v) == 0.0)


# Figure-style fixture: strong latent so the contamination is detectable,
# moderate regularization so the standard fit does not interpolate it away.
FIG_PARAMS = rk.TwoViewParams(n=300, seed=0, latent_scale=2.0,
                              contamination_rate=0.05)
FIG_FIT = dict(n_components=5, kernel="linear", kappa=1.0)


def test_criterion_7_figure_reproduction():
    with criterion(7, "standard EIF finds outliers; robust maxima are smaller", 60.0):
        ds = rk.gen_two_view(FIG_PARAMS)
        Xc, Yc = ds.views
        profiles = {}
        for loss in ("square", "huber", "hampel"):
            model = rk.KernelCCA(loss=loss, **FIG_FIT).fit(Xc, Yc)
            profiles[loss] = rk.eif_kernel_corr(model, component=1).values
        k = round(0.05 * FIG_PARAMS.n)
        top = set(rk.rank_outliers(profiles["square"], k).tolist())
        recall = len(top & set(ds.contaminated_indices.tolist())) / len(
            ds.contaminated_indices
        )
        assert recall >= 0.5
        max_standard = np.abs(profiles["square"]).max()
        assert np.abs(profiles["huber"]).max() <= max_standard
        assert np.abs(profiles["hampel"]).max() <= max_standard


def test_criterion_8_three_view_pipeline():
    with criterion(8, "three-view fit, m=2 consistency, outlier separation", 60.0):
        ds = rk.gen_three_view(rk.ThreeViewParams(n=200, seed=0))
        multi = rk.MultiviewKernelCCA(n_components=3, kernel="linear",
                                      loss="square", kappa=1.0).fit(ds.views)
        profile = rk.eif_multiple_kernel_corr(multi, component=1)

        pair = rk.KernelCCA(n_components=3, kernel="linear", loss="square",
                            kappa=1.0).fit(ds.views[0], ds.views[1])
        two = rk.MultiviewKernelCCA(n_components=3, kernel="linear",
                                    loss="square", kappa=1.0).fit(ds.views[:2])
        assert np.abs(two.correlations_ - pair.correlations_).max() <= 1e-10

        mask = np.zeros(200, dtype=bool)
        mask[ds.contaminated_indices] = True
        contaminated_mean = np.abs(profile.values)[mask].mean()
        clean_mean = np.abs(profile.values)[~mask].mean()
        assert contaminated_mean > clean_mean


def test_criterion_9_end_to_end_reproducibility(tmp_path, monkeypatch):
    with criterion(9, "pipeline outputs byte-identical across runs", 120.0):
        roots = [tmp_path / "run1", tmp_path / "run2"]
        for root in roots:
            root.mkdir()
            monkeypatch.chdir(root)
            _run_pipeline_steps()
        mismatch = _tree_mismatch(roots[0], roots[1])
        assert not mismatch, f"outputs differ: {mismatch}"


def _run_pipeline_steps():
    steps = [
        ["simulate", "--mode", "two-view", "--n", "60", "--seed", "11",
         "--latent-scale", "2.0", "--out", "sim", "--quiet"],
        ["fit", "--x", "sim/x.csv", "--y", "sim/y.csv", "--kernel", "linear",
         "--loss", "huber", "--kappa", "1.0", "--ncomp", "2",
         "--out", "fit", "--quiet"],
        ["influence", "--x", "sim/x_clean.csv", "--y", "sim/y_clean.csv",
         "--x-contaminated", "sim/x.csv", "--y-contaminated", "sim/y.csv",
         "--kernel", "linear", "--kappa", "1.0", "--ncomp", "2",
         "--out", "inf", "--quiet"],
        ["compare", "--x", "sim/x_clean.csv", "--y", "sim/y_clean.csv",
         "--x-contaminated", "sim/x.csv", "--y-contaminated", "sim/y.csv",
         "--kernel", "linear", "--kappa", "1.0", "--ncomp", "2",
         "--manifest", "sim/simulate_manifest.json", "--out", "cmp", "--quiet"],
    ]
    for step in steps:
        assert cli_main(step) == 0


def _tree_mismatch(a, b):
    bad = []
    for sub in ("sim", "fit", "inf", "cmp"):
        cmp_result = filecmp.dircmp(a / sub, b / sub)
        names = cmp_result.left_list
        match, mismatch, errors = filecmp.cmpfiles(a / sub, b / sub, names,
                                                   shallow=False)
        bad += [f"{sub}/{name}" for name in mismatch + errors]
    return bad
