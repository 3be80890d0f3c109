"""Command-line interface: fit, depth, outliers, simulate, align.

Exit codes: 0 success, 2 input format problem, 3 degenerate model (no
eigenvalue survives the threshold), 4 grid mismatch between files, 5
invalid configuration (unsupported flag combination).

All commands taking --seed are reproducible byte-for-byte. The environment
variable FDEPTH_THREADS caps the internal worker count; results do not
depend on it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import io as fio
from .core import FunctionalSample, Grid, GridFunction, GridMismatchError
from .covkernel import DegenerateModelError, FittedModel, fit_model
from .criteria import Criterion, WeightSequence
from .depth import (
    DepthResult,
    bootstrap_reference,
    chisq_depth,
    gaussian_reference,
    halfspace_depth_closed_form,
    mc_depth,
    synthetic_functions,
    _map_values,
    _reference_values,
)
from .simgen import (
    brownian_bridge_laplace_sample,
    fourier_gp_sample,
    fourier_outlier_sample,
    gp_sample,
    matern_kernel_matrix,
    mvn_sample,
    two_bump_warped_sample,
)
from .warping import karcher_mean

EXIT_OK = 0
EXIT_FORMAT = 2
EXIT_DEGENERATE = 3
EXIT_GRID = 4
EXIT_CONFIG = 5

_CRITERION_CHOICES = (
    "lp",
    "derivative-lp",
    "modified-rkhs",
    "rkhs",
    "warp-l2",
    "warp-fisher-rao",
    "halfspace",
    "chisq",
    "mahalanobis",
)
_COEFF_KINDS = ("modified-rkhs", "rkhs")
_WARP_KINDS = ("warp-l2", "warp-fisher-rao")
_CLOSED_FORMS = ("halfspace", "chisq")


class ConfigError(ValueError):
    """An unsupported flag combination (exit code 5)."""


def _parse_weights(text: str) -> WeightSequence:
    if text == "constant-one":
        return WeightSequence.constant_one()
    if text == "inverse-p":
        return WeightSequence.inverse_p()
    if text == "inverse-sqrt-log":
        return WeightSequence.inverse_sqrt_log()
    if text.startswith("power:"):
        try:
            return WeightSequence.power(float(text.split(":", 1)[1]))
        except ValueError as exc:
            raise ConfigError(f"bad power weight parameter: {exc}") from None
    raise ConfigError(
        f"unknown weight sequence {text!r} "
        "(choices: inverse-p, inverse-sqrt-log, power:S, constant-one)"
    )


def _build_criterion(args, model: FittedModel | None) -> Criterion:
    kind = args.criterion
    if kind == "lp":
        crit = Criterion.lp(args.p)
    elif kind == "derivative-lp":
        crit = Criterion.derivative_lp(args.r, args.p)
    elif kind == "modified-rkhs":
        weights = _parse_weights(args.weights or "inverse-p")
        if not weights.square_summable and not args.allow_divergent:
            raise ConfigError(
                "constant-one weights make the norm diverge for "
                "infinite-dimensional processes; pass --allow-divergent to "
                "use them with a deliberately finite-dimensional model"
            )
        crit = Criterion.modified_rkhs(weights=weights)
    elif kind == "rkhs":
        crit = Criterion.rkhs()
    elif kind == "warp-l2":
        crit = Criterion.warp_l2()
    elif kind == "warp-fisher-rao":
        crit = Criterion.warp_fisher_rao()
    elif kind == "mahalanobis":
        raise ConfigError(
            "mahalanobis scores multivariate rows, not functional datasets; "
            "use the library API (fdepth.depth.mc_depth) for point data"
        )
    else:
        raise ConfigError(f"criterion {kind!r} is not settable here")
    if crit.kind in _COEFF_KINDS and model is not None:
        crit = crit.with_context(system=model.system)
    return crit


def _training_sample(model: FittedModel) -> FunctionalSample:
    """The fitting sample as stored: truncated reconstruction from coefficients."""
    sample = synthetic_functions(model.coeffs.coeffs, model.system, f_c=model.mean)
    if model.ids is not None:
        sample = FunctionalSample(sample.grid, sample.values, ids=model.ids)
    return sample


def _resolve_center(args, model: FittedModel, kind: str) -> GridFunction:
    mode = args.fc
    if mode is None:
        mode = "karcher" if kind in _WARP_KINDS else "mean"
    if mode == "mean":
        return model.mean
    template, _ = karcher_mean(_training_sample(model))
    return template


def _reference_zetas(args, model: FittedModel, crit: Criterion, f_c) -> tuple[np.ndarray, int, int]:
    """Criterion values of the reference set; returns (values, N, seed)."""
    if args.estimator == "monte-carlo":
        if args.reference == "gaussian":
            rows = gaussian_reference(model.system, args.N, args.seed)
        else:
            rows = bootstrap_reference(model.coeffs, args.N, args.seed)
        if crit.kind in _COEFF_KINDS:
            ref = rows
        else:
            ref = synthetic_functions(rows, model.system, f_c=model.mean)
        return _reference_values(crit, ref, f_c), args.N, args.seed
    # sample-average: the training sample itself is the reference
    if crit.kind in _COEFF_KINDS:
        ref = model.coeffs.coeffs
    else:
        ref = _training_sample(model)
    return _reference_values(crit, ref, f_c), model.n, 0


def cmd_fit(args) -> int:
    sample = fio.read_dataset(args.input)
    model = fit_model(sample, delta=args.delta, center=args.center)
    fio.write_model(args.out, model)
    print(
        f"fitted n={model.n} m={model.grid.m}: retained C={model.system.C} "
        f"of {model.system.raw_count} eigenvalues at delta={model.delta:.6g}"
    )
    return EXIT_OK


def _score_closed_form(args, model: FittedModel, query: FunctionalSample):
    form = args.criterion
    f_c = model.mean if args.fc in (None, "mean") else _resolve_center(args, model, form)
    results = []
    for f in query:
        if form == "halfspace":
            results.append(halfspace_depth_closed_form(f, model.system, f_c=f_c))
        else:
            results.append(chisq_depth(f, model.system, f_c=f_c))
    return results


def cmd_depth(args) -> int:
    if not 0.0 < args.alpha < 1.0:
        raise ConfigError("alpha must lie in (0, 1)")
    model = fio.read_model(args.model)
    query = fio.read_dataset(args.query)
    if query.grid != model.grid:
        raise GridMismatchError(
            f"query grid ({query.grid}) does not match the model grid ({model.grid})"
        )

    if args.criterion in _CLOSED_FORMS:
        if args.estimator not in (None, "closed-form"):
            raise ConfigError(f"criterion {args.criterion} is closed-form only")
        results = _score_closed_form(args, model, query)
        weights_name = None
    else:
        if args.estimator in (None, "closed-form"):
            args.estimator = "monte-carlo" if args.estimator is None else args.estimator
        if args.estimator == "closed-form":
            raise ConfigError(
                "closed forms are selected via --criterion halfspace|chisq"
            )
        crit = _build_criterion(args, model)
        f_c = _resolve_center(args, model, crit.kind)
        zeta_ref, n_ref, seed_ref = _reference_zetas(args, model, crit, f_c)
        zeta_obs = _map_values(crit, query, f_c)
        results = []
        for z in zeta_obs:
            if args.estimator == "monte-carlo":
                value = float(np.mean(z <= zeta_ref))
            else:
                value = float(np.mean(zeta_ref >= z))
            results.append(
                DepthResult(value, crit.tag, args.estimator, n_ref, seed_ref, float(z))
            )
        weights_name = crit.weights.name if crit.kind == "modified-rkhs" else None

    flags = [r.value < args.alpha for r in results]
    report = fio.depth_report(
        results[0].criterion,
        results[0].estimator,
        results[0].N,
        results[0].seed,
        model.delta,
        weights_name,
        query.ids,
        results,
        flags,
    )
    text = fio.format_report(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.plot_csv:
        fio.write_plot_csv(args.plot_csv, query, [r.value for r in results])
    return EXIT_OK


def cmd_outliers(args) -> int:
    if not 0.0 < args.alpha < 1.0:
        raise ConfigError("alpha must lie in (0, 1)")
    model = fio.read_model(args.model)
    ids = model.ids if model.ids is not None else [str(i) for i in range(model.n)]

    if args.criterion in _CLOSED_FORMS:
        query = _training_sample(model)
        results = _score_closed_form(args, model, query)
        weights_name = None
    else:
        if args.estimator in (None, "closed-form"):
            args.estimator = "monte-carlo"
        crit = _build_criterion(args, model)
        f_c = _resolve_center(args, model, crit.kind)
        zeta_ref, n_ref, seed_ref = _reference_zetas(args, model, crit, f_c)
        if crit.kind in _COEFF_KINDS:
            zeta_obs = _reference_values(crit, model.coeffs.coeffs, f_c)
        else:
            zeta_obs = _map_values(crit, _training_sample(model), f_c)
        results = []
        for z in zeta_obs:
            value = float(np.mean(z <= zeta_ref))
            results.append(
                DepthResult(value, crit.tag, args.estimator, n_ref, seed_ref, float(z))
            )
        weights_name = crit.weights.name if crit.kind == "modified-rkhs" else None

    flags = [r.value < args.alpha for r in results]
    report = fio.depth_report(
        results[0].criterion,
        results[0].estimator,
        results[0].N,
        results[0].seed,
        model.delta,
        weights_name,
        ids,
        results,
        flags,
    )
    text = fio.format_report(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _simulate_preset(preset: str, seed: int):
    """Returns (sample or points, metadata dict)."""
    if preset == "sim1":
        grid = Grid(0.0, 1.0, 101)
        rough = gp_sample(matern_kernel_matrix(0.5, 1.0, grid), 1, seed)
        smooth = gp_sample(matern_kernel_matrix(1.5, 1.0, grid), 29, seed, stream_offset=1)
        values = np.vstack([rough.values, smooth.values])
        meta = {"interloper_ids": ["0"], "kernels": ["matern-1/2"] + ["matern-3/2"] * 29}
        return FunctionalSample(grid, values), meta
    if preset == "sim2":
        sample = two_bump_warped_sample(21, seed)
        return sample, {"noisy_id": "10", "interval": [-3.0, 3.0]}
    if preset == "sim3":
        sample, _ = brownian_bridge_laplace_sample(100, 1000, seed)
        return sample, {"P_trunc": 1000, "coefficients": "laplace"}
    if preset == "sim4":
        sample, outliers = fourier_outlier_sample(100, seed)
        return sample, {"P": 100, "outlier_ids": [str(i) for i in outliers]}
    if preset == "sim5":
        sample = fourier_gp_sample(10, "decaying-normal", 500, seed, grid=Grid(0.0, 1.0, 401))
        return sample, {"P": 10, "coeff_law": "decaying-normal"}
    if preset == "sim6":
        points = mvn_sample([0.0, 0.0], [[1.0, 1.0 / 3.0], [1.0 / 3.0, 0.25]], 50, seed)
        return points, {"mu": [0.0, 0.0], "sigma": [[1.0, 1.0 / 3.0], [1.0 / 3.0, 0.25]]}
    raise ConfigError(f"unknown preset {preset!r}")


def cmd_simulate(args) -> int:
    data, meta = _simulate_preset(args.preset, args.seed)
    meta = {"preset": args.preset, "seed": args.seed, **meta}
    if isinstance(data, FunctionalSample):
        fio.write_dataset(args.out, data)
    else:
        # multivariate rows: id column plus one column per coordinate
        with open(args.out, "w", newline="") as fh:
            fh.write("id," + ",".join(f"x{j}" for j in range(data.shape[1])) + "\n")
            for i, row in enumerate(data):
                fh.write(str(i) + "," + ",".join(format(v, ".17g") for v in row) + "\n")
    meta_path = os.path.splitext(args.out)[0] + ".meta.json"
    with open(meta_path, "w") as fh:
        json.dump(meta, fh, indent=1)
        fh.write("\n")
    print(f"wrote {args.out} and {meta_path}")
    return EXIT_OK


def cmd_align(args) -> int:
    sample = fio.read_dataset(args.input)
    if sample.n < 2:
        raise fio.DatasetFormatError("alignment needs at least 2 rows")
    template, warpings = karcher_mean(sample, max_iter=args.max_iter, tol=args.tol)
    fio.write_dataset(
        args.out_template,
        FunctionalSample(sample.grid, template.values[None, :], ids=["template"]),
    )
    gamma_rows = np.vstack([w.values for w in warpings])
    fio.write_dataset(
        args.out_warpings, FunctionalSample(sample.grid, gamma_rows, ids=sample.ids)
    )
    print(f"aligned {sample.n} functions; wrote {args.out_template}, {args.out_warpings}")
    return EXIT_OK


def _add_criterion_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--criterion", choices=_CRITERION_CHOICES, default="modified-rkhs")
    p.add_argument("--p", type=float, default=2.0, help="Lp exponent (lp, derivative-lp)")
    p.add_argument("--r", type=int, default=1, choices=(1, 2), help="derivative order")
    p.add_argument(
        "--weights",
        default=None,
        help="modified-rkhs weight sequence: inverse-p, inverse-sqrt-log, power:S, constant-one",
    )
    p.add_argument(
        "--allow-divergent",
        action="store_true",
        help="permit non-square-summable weights (constant-one)",
    )
    p.add_argument(
        "--estimator",
        choices=("monte-carlo", "sample-average", "closed-form"),
        default=None,
        help="defaults to monte-carlo (closed forms via --criterion halfspace|chisq)",
    )
    p.add_argument("--N", type=int, default=1000, help="Monte Carlo reference size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--reference",
        choices=("bootstrap", "gaussian"),
        default="bootstrap",
        help="Monte Carlo coefficient sampler",
    )
    p.add_argument(
        "--fc",
        choices=("mean", "karcher"),
        default=None,
        help="center: fitted mean (default) or elastic template (default for warp criteria)",
    )
    p.add_argument("--alpha", type=float, default=0.05, help="outlier flag threshold")
    p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdepth",
        description="Model-based statistical depth for functional data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit the covariance eigensystem model")
    p_fit.add_argument("input", help="dataset CSV")
    p_fit.add_argument("--out", required=True, help="model JSON path")
    p_fit.add_argument("--delta", type=float, default=None, help="eigenvalue threshold")
    p_fit.add_argument(
        "--center",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="subtract the sample mean (disable for declared zero-mean data)",
    )
    p_fit.set_defaults(func=cmd_fit)

    p_depth = sub.add_parser("depth", help="score query functions against a model")
    p_depth.add_argument("model", help="model JSON from fit")
    p_depth.add_argument("query", help="dataset CSV of query functions")
    _add_criterion_flags(p_depth)
    p_depth.add_argument("--plot-csv", default=None, help="long-format CSV (id,t,value,depth)")
    p_depth.set_defaults(func=cmd_depth)

    p_out = sub.add_parser("outliers", help="flag low-depth functions of the fitted sample")
    p_out.add_argument("model", help="model JSON from fit")
    _add_criterion_flags(p_out)
    p_out.set_defaults(func=cmd_outliers)

    p_sim = sub.add_parser("simulate", help="write a simulation preset dataset")
    p_sim.add_argument(
        "--preset",
        required=True,
        choices=("sim1", "sim2", "sim3", "sim4", "sim5", "sim6"),
    )
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", required=True, help="dataset CSV path (metadata JSON beside it)")
    p_sim.set_defaults(func=cmd_simulate)

    p_align = sub.add_parser("align", help="elastic alignment: template and warpings")
    p_align.add_argument("input", help="dataset CSV")
    p_align.add_argument("--out-template", required=True)
    p_align.add_argument("--out-warpings", required=True)
    p_align.add_argument("--max-iter", type=int, default=20)
    p_align.add_argument("--tol", type=float, default=1e-4)
    p_align.set_defaults(func=cmd_align)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except fio.DatasetFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"error: cannot read or write file: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except DegenerateModelError as exc:
        print(f"error: degenerate model: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except GridMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GRID
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
