"""Command-line pipeline: simulate -> fit -> influence -> compare.

Every command writes its outputs plus a ``<command>_manifest.json``
recording parameters, input hashes, the seed and the produced files, so a
run is byte-reproducible from the manifest alone.  Exit codes: 0 success,
2 usage error, 3 data error, 4 numerical failure.
"""

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .cca import KernelCCA, MultiviewKernelCCA
from .exceptions import DataValidationError, NumericalError
from .influence import eif_kernel_corr, eif_multiple_kernel_corr, rank_outliers
from .simulate import ThreeViewParams, TwoViewParams, gen_three_view, gen_two_view
from .svgplot import influence_grid_svg

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4

# CLI constraint vocabulary -> estimator constraint modes; the historical
# mode names stay accepted alongside the descriptive ones
CONSTRAINT_BY_FLAG = {
    "paper": "variance",
    "variance": "variance",
    "listing": "ridge",
    "ridge": "ridge",
}

METHODS = ("linear-cca", "kernel-cca", "huber", "hampel")
METHOD_CAPTIONS = {
    "linear-cca": "Linear CCA",
    "kernel-cca": "Kernel CCA",
    "huber": "Huber's robust kernel CCA",
    "hampel": "Hampel's robust kernel CCA",
}


def _say(args, message):
    if not args.quiet:
        print(message)


def _write_matrix(path, M):
    np.savetxt(path, np.atleast_2d(np.asarray(M, dtype=float)),
               delimiter=",", fmt="%.17g")


def _read_matrix(path, header=False):
    try:
        M = np.loadtxt(path, delimiter=",", skiprows=1 if header else 0, ndmin=2)
    except OSError as exc:
        raise DataValidationError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise DataValidationError(f"cannot parse {path}: {exc}") from exc
    return M


def _sha256(path):
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_manifest(out_dir, command, params, inputs, outputs, seed):
    manifest = {
        "command": command,
        "params": params,
        "seed": seed,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": sorted(outputs),
        "versions": {
            "robustkcca": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }
    name = f"{command}_manifest.json"
    _write_json(out_dir / name, manifest)
    return name


def _out_dir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _loss_params(args):
    params = {}
    if getattr(args, "loss_c", None) is not None:
        params["c"] = args.loss_c
    for key in ("c1", "c2", "c3"):
        value = getattr(args, f"loss_{key}", None)
        if value is not None:
            params[key] = value
    return params or None


def cmd_simulate(args):
    out = _out_dir(args)
    common = dict(
        n=args.n,
        n_features=args.n_features,
        latent_scale=args.latent_scale,
        noise_scale=args.noise_scale,
        contamination_rate=args.contamination_rate,
        seed=args.seed,
    )
    if args.mode == "two-view":
        dataset = gen_two_view(TwoViewParams(**common))
        names = ["x", "y"]
    else:
        dataset = gen_three_view(ThreeViewParams(**common))
        names = ["x", "y", "z"]

    outputs = []
    for name, view, clean in zip(names, dataset.views, dataset.clean_views):
        _write_matrix(out / f"{name}.csv", view)
        _write_matrix(out / f"{name}_clean.csv", clean)
        outputs += [f"{name}.csv", f"{name}_clean.csv"]

    params = dict(common, mode=args.mode,
                  contaminated_indices=dataset.contaminated_indices.tolist())
    outputs.append(_write_manifest(out, "simulate", params, [], outputs, args.seed))
    _say(args, f"wrote {len(outputs)} files to {out}")
    return EXIT_OK


def _convergence_entry(wv):
    obj = wv.final_objective
    return {
        "iterations": wv.iterations,
        "converged": wv.converged,
        "final_objective": None if np.isnan(obj) else obj,
    }


def cmd_fit(args):
    out = _out_dir(args)
    views = [_read_matrix(args.x, args.header), _read_matrix(args.y, args.header)]
    inputs = [args.x, args.y]
    if args.z:
        views.append(_read_matrix(args.z, args.header))
        inputs.append(args.z)

    kwargs = dict(
        n_components=args.ncomp,
        kernel=args.kernel,
        loss=args.loss,
        loss_params=_loss_params(args),
        kappa=args.kappa,
        constraint=CONSTRAINT_BY_FLAG[args.constraint],
        max_iter=args.max_iter,
        tol=args.tol,
    )
    names = ["x", "y", "z"][: len(views)]
    if len(views) == 2:
        model = KernelCCA(**kwargs).fit(views[0], views[1])
        variates = [model.x_variates_, model.y_variates_]
        mean_weights = [model.x_sample_weights_, model.y_sample_weights_]
        bandwidths = [model.x_bandwidth_, model.y_bandwidth_]
    else:
        model = MultiviewKernelCCA(**kwargs).fit(views)
        variates = model.variates_
        mean_weights = model.sample_weights_
        bandwidths = model.bandwidths_

    outputs = []
    for name, cv in zip(names, variates):
        _write_matrix(out / f"variates_{name}.csv", cv)
        outputs.append(f"variates_{name}.csv")

    solution = {
        "kcor": model.correlations_.tolist(),
        "eigenvalues": model.eigenvalues_.tolist(),
        "kernel": args.kernel,
        "bandwidths": {n: bw for n, bw in zip(names, bandwidths)},
        "loss": args.loss,
        "kappa": args.kappa,
        "constraint": args.constraint,
        "n_components": args.ncomp,
        "convergence": {
            **{n: _convergence_entry(wv) for n, wv in zip(names, mean_weights)},
            "joint": _convergence_entry(model.joint_sample_weights_),
        },
    }
    _write_json(out / "solution.json", solution)
    outputs.append("solution.json")
    params = {k: v for k, v in vars(args).items()
              if k not in ("func", "quiet", "out")}
    outputs.append(_write_manifest(out, "fit", params, inputs, outputs, args.seed))
    _say(args, f"kcor_1 = {model.correlations_[0]:.6f}; wrote {out}/solution.json")
    return EXIT_OK


def _fit_method(method, views, args):
    kwargs = dict(n_components=args.ncomp, kappa=args.kappa)
    if method == "linear-cca":
        kwargs.update(kernel="linear", loss="square")
    elif method == "kernel-cca":
        kwargs.update(kernel=args.kernel, loss="square")
    else:
        kwargs.update(kernel=args.kernel, loss=method)
    if len(views) == 2:
        model = KernelCCA(**kwargs).fit(views[0], views[1])
        profile = eif_kernel_corr(model, component=args.component)
    else:
        model = MultiviewKernelCCA(**kwargs).fit(views)
        profile = eif_multiple_kernel_corr(model, component=args.component)
    return model, profile


def _load_conditions(args):
    """(condition name, views, input paths) for ideal and, if given, contaminated."""
    ideal = [_read_matrix(args.x, args.header), _read_matrix(args.y, args.header)]
    paths = [args.x, args.y]
    if args.z:
        ideal.append(_read_matrix(args.z, args.header))
        paths.append(args.z)
    conditions = [("ideal", ideal)]
    cont_paths = [p for p in (args.x_contaminated, args.y_contaminated,
                              args.z_contaminated) if p]
    expected = 3 if args.z else 2
    if cont_paths and len(cont_paths) != expected:
        raise DataValidationError(
            f"contaminated condition needs {expected} view files, got {len(cont_paths)}"
        )
    if cont_paths:
        conditions.append(
            ("contaminated", [_read_matrix(p, args.header) for p in cont_paths])
        )
        paths += cont_paths
    return conditions, paths


def _profile_rows(values):
    n = values.shape[0]
    order = rank_outliers(values, n)
    rank = np.empty(n, dtype=int)
    rank[order] = np.arange(1, n + 1)
    return rank


def cmd_influence(args):
    out = _out_dir(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not methods:
        raise DataValidationError("empty method list")
    for m in methods:
        if m not in METHODS:
            raise DataValidationError(
                f"unknown method {m!r}; choose from {', '.join(METHODS)}"
            )
    conditions, inputs = _load_conditions(args)

    outputs = []
    grid = []
    for method in methods:
        profiles = []
        for cond_name, views in conditions:
            _, profile = _fit_method(method, views, args)
            values = profile.values
            if args.format in ("csv", "both"):
                name = f"eif_{method}_{cond_name}.csv"
                rank = _profile_rows(values)
                rows = np.column_stack([np.arange(values.shape[0]), values, rank])
                np.savetxt(out / name, rows, delimiter=",", fmt="%.17g",
                           header="index,eif_value,rank", comments="")
                outputs.append(name)
            profiles.append(values)
        grid.append((METHOD_CAPTIONS[method], profiles))

    if args.format in ("svg", "both"):
        titles = ["Ideal Data"] + (
            ["Contaminated Data"] if len(conditions) == 2 else []
        )
        (out / "influence.svg").write_text(influence_grid_svg(grid, titles))
        outputs.append("influence.svg")

    params = {k: v for k, v in vars(args).items()
              if k not in ("func", "quiet", "out")}
    outputs.append(_write_manifest(out, "influence", params, inputs, outputs,
                                   args.seed))
    _say(args, f"wrote {len(outputs)} files to {out}")
    return EXIT_OK


def _contaminated_indices(args):
    if args.manifest:
        with open(args.manifest) as fh:
            manifest = json.load(fh)
        try:
            return np.asarray(manifest["params"]["contaminated_indices"], dtype=int)
        except KeyError as exc:
            raise DataValidationError(
                f"{args.manifest} has no contaminated_indices"
            ) from exc
    if args.indices:
        return np.asarray(
            [int(tok) for tok in args.indices.split(",") if tok.strip()], dtype=int
        )
    return None


def cmd_compare(args):
    out = _out_dir(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not methods:
        raise DataValidationError("empty method list")
    conditions, inputs = _load_conditions(args)
    contaminated = _contaminated_indices(args)
    if args.manifest:
        inputs.append(args.manifest)

    n_views = 3 if args.z else 2
    view_names = ["x", "y", "z"][:n_views]
    lines = [
        "method,condition,max_abs_eif,top5pct_recall,"
        + ",".join(f"iters_{n}" for n in view_names)
        + ",iters_joint"
    ]
    for method in methods:
        for cond_name, views in conditions:
            model, profile = _fit_method(method, views, args)
            values = profile.values
            n = values.shape[0]
            recall = ""
            if cond_name == "contaminated" and contaminated is not None:
                k = max(int(np.rint(0.05 * n)), 1)
                top = set(rank_outliers(values, k).tolist())
                recall = format(
                    len(top & set(contaminated.tolist())) / contaminated.size, ".17g"
                )
            if n_views == 2:
                iters = [model.x_sample_weights_.iterations,
                         model.y_sample_weights_.iterations]
            else:
                iters = [wv.iterations for wv in model.sample_weights_]
            iters.append(model.joint_sample_weights_.iterations)
            lines.append(
                ",".join(
                    [method, cond_name, format(np.abs(values).max(), ".17g"), recall]
                    + [str(i) for i in iters]
                )
            )
    (out / "compare.csv").write_text("\n".join(lines) + "\n")

    outputs = ["compare.csv"]
    params = {k: v for k, v in vars(args).items()
              if k not in ("func", "quiet", "out")}
    outputs.append(_write_manifest(out, "compare", params, inputs, outputs,
                                   args.seed))
    _say(args, f"wrote {out}/compare.csv ({len(lines) - 1} rows)")
    return EXIT_OK


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--quiet", action="store_true", help="suppress progress output")

    fit_common = argparse.ArgumentParser(add_help=False)
    fit_common.add_argument("--kernel", choices=["linear", "rbf", "ibs"],
                            default="rbf")
    fit_common.add_argument("--kappa", type=float, default=1e-5,
                            help="regularization strength")
    fit_common.add_argument("--ncomp", type=_positive_int, default=10,
                            help="number of canonical components")
    fit_common.add_argument("--header", action="store_true",
                            help="input CSVs carry a header row")

    parser = argparse.ArgumentParser(
        prog="robustkcca",
        description="Robust kernel CCA and influence-based outlier detection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", parents=[common],
                           help="generate synthetic multi-view data")
    p_sim.add_argument("--mode", choices=["two-view", "three-view"], required=True)
    p_sim.add_argument("--n", type=int, default=300)
    p_sim.add_argument("--n-features", type=int, default=100)
    p_sim.add_argument("--latent-scale", type=float, default=0.5)
    p_sim.add_argument("--noise-scale", type=float, default=1.0)
    p_sim.add_argument("--contamination-rate", type=float, default=0.05)
    p_sim.set_defaults(func=cmd_simulate)

    p_fit = sub.add_parser("fit", parents=[common, fit_common],
                           help="fit (robust) kernel CCA on view CSVs")
    p_fit.add_argument("--x", required=True)
    p_fit.add_argument("--y", required=True)
    p_fit.add_argument("--z", default=None, help="optional third view")
    p_fit.add_argument("--loss", choices=["square", "huber", "hampel", "tukey"],
                       default="huber")
    p_fit.add_argument("--loss-c", type=float, default=None,
                       help="explicit huber/tukey constant")
    p_fit.add_argument("--loss-c1", type=float, default=None)
    p_fit.add_argument("--loss-c2", type=float, default=None)
    p_fit.add_argument("--loss-c3", type=float, default=None)
    p_fit.add_argument("--constraint", choices=sorted(CONSTRAINT_BY_FLAG),
                       default="paper",
                       help="constraint blocks: paper/variance = weighted "
                            "variance plus norm penalty; listing/ridge = "
                            "plain ridge on the centered Gram matrix")
    p_fit.add_argument("--max-iter", type=int, default=100)
    p_fit.add_argument("--tol", type=float, default=1e-8)
    p_fit.set_defaults(func=cmd_fit)

    p_inf = sub.add_parser("influence", parents=[common, fit_common],
                           help="influence profiles per method and condition")
    p_inf.add_argument("--x", required=True)
    p_inf.add_argument("--y", required=True)
    p_inf.add_argument("--z", default=None)
    p_inf.add_argument("--x-contaminated", default=None)
    p_inf.add_argument("--y-contaminated", default=None)
    p_inf.add_argument("--z-contaminated", default=None)
    p_inf.add_argument("--methods", default=",".join(METHODS))
    p_inf.add_argument("--component", type=int, default=1)
    p_inf.add_argument("--format", choices=["svg", "csv", "both"], default="both")
    p_inf.set_defaults(func=cmd_influence)

    p_cmp = sub.add_parser("compare", parents=[common, fit_common],
                           help="tabulate per-method influence summaries")
    p_cmp.add_argument("--x", required=True)
    p_cmp.add_argument("--y", required=True)
    p_cmp.add_argument("--z", default=None)
    p_cmp.add_argument("--x-contaminated", default=None)
    p_cmp.add_argument("--y-contaminated", default=None)
    p_cmp.add_argument("--z-contaminated", default=None)
    p_cmp.add_argument("--methods", default=",".join(METHODS))
    p_cmp.add_argument("--component", type=int, default=1)
    p_cmp.add_argument("--manifest", default=None,
                       help="simulate manifest holding contaminated indices")
    p_cmp.add_argument("--indices", default=None,
                       help="comma-separated contaminated indices")
    p_cmp.set_defaults(func=cmd_compare)
    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (DataValidationError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
