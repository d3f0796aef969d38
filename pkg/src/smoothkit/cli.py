"""Command-line interface.

Every subcommand writes its data products into ``--outdir`` under a common
prefix (default: the subcommand name) plus a ``<prefix>.manifest.json``
listing the parsed parameters, the SHA-256 of the input CSV and the files
written with their hashes. Exit codes: 0 success, 1 computation error,
2 usage error. Diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .additive import AdditiveSpec, backfit
from .dataio import Dataset, FitSummary, emit_curve, load_csv, write_csv, write_table
from .errors import SmoothkitError, UsageError
from .harness import OUTLIER_WINDOW, REFERENCE_BANDWIDTH, compare_robust, fits_for_seed, summarize
from .kernelreg import KernelRegSpec, kernel_fit_info, localpoly_fit
from .kernels import KERNEL_NAMES
from .parametric import anova_nested, diagnostics, fit_poly
from .robust import RobustConfig, robust_fit
from .simulate import REFERENCE_OUTLIERS, TRUTHS, SimRecipe, generate
from .singleindex import SimOptions, sim_fit
from .splinereg import SplineSpec, spline_fit

log = logging.getLogger("smoothkit")

COMMANDS = (
    "fit-poly",
    "fit-kernel",
    "fit-spline",
    "fit-additive",
    "fit-sim",
    "fit-robust",
    "simulate",
    "diagnose",
    "compare-robust",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


class Run:
    """Collects the files a command writes and emits its manifest."""

    def __init__(self, args, input_path=None):
        self.args = args
        self.outdir = Path(args.outdir)
        self.outdir.mkdir(parents=True, exist_ok=True)
        self.prefix = args.prefix or args.command
        self.input_hash = _sha256(Path(input_path)) if input_path else None
        self.outputs: list[Path] = []

    def path(self, suffix: str) -> Path:
        p = self.outdir / f"{self.prefix}{suffix}"
        self.outputs.append(p)
        return p

    def finish(self) -> None:
        params = {k: v for k, v in sorted(vars(self.args).items()) if k not in ("func", "subparsers")}
        manifest = {
            "schema": 1,
            "command": self.args.command,
            "params": params,
            "input_hash": self.input_hash,
            "outputs": [{"path": p.name, "sha256": _sha256(p)} for p in self.outputs],
        }
        mpath = self.outdir / f"{self.prefix}.manifest.json"
        mpath.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
        for p in self.outputs:
            print(p)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _load(args) -> Dataset:
    return load_csv(args.input, args.response, args.factor)


def _univariate(args, data: Dataset) -> Dataset:
    name = args.x or data.names[0]
    return data.select([name])


def _grid(x, n_points: int):
    if n_points < 2:
        raise UsageError("--grid needs at least 2 points")
    return np.linspace(np.min(x), np.max(x), n_points)


def _positive_or(value: str, words: dict, flag: str):
    if value in words:
        return words[value]
    try:
        v = float(value)
    except ValueError:
        raise UsageError(f"{flag} must be a positive number or one of {sorted(words)}") from None
    return v


def cmd_fit_poly(args) -> None:
    data = _univariate(args, _load(args))
    run = Run(args, args.input)
    fit = fit_poly(data, args.degree)
    extra = {"f_stat": fit.f_stat, "p_value": fit.p_value, "degree": fit.degree, "rss": fit.rss}
    if args.anova_against is not None:
        other = fit_poly(data, args.anova_against)
        small, big = sorted([fit, other], key=lambda f: f.degree)
        f_stat, p = anova_nested(small, big, data.n)
        extra["anova"] = {"small_degree": small.degree, "big_degree": big.degree, "f_stat": f_stat, "p_value": p}
    coeffs = {f"b{j}": c for j, c in enumerate(fit.coeffs)}
    FitSummary(f"polynomial-{fit.degree}", data.n, None, coeffs, fit.r_squared, fit.degree + 1.0, extra).write(
        run.path(".json")
    )
    write_table(run.path(".diagnostics.tsv"), diagnostics(fit).columns())
    if args.plot:
        from .plotting import plot_curve
        from .dataio import FitCurve

        grid = _grid(data.x1(), args.grid)
        pred = fit.predict(grid)
        plot_curve(FitCurve(grid, pred, np.zeros_like(pred), pred, pred), data.x1(), data.y, run.path(".png"))
    run.finish()


def cmd_diagnose(args) -> None:
    data = _univariate(args, _load(args))
    run = Run(args, args.input)
    diag = diagnostics(fit_poly(data, args.degree))
    write_table(run.path(".tsv"), diag.columns())
    if args.plot:
        from .plotting import plot_diagnostics

        plot_diagnostics(diag, run.path(".png"))
    run.finish()


def cmd_fit_kernel(args) -> None:
    data = _univariate(args, _load(args))
    run = Run(args, args.input)
    bw = _positive_or(args.bandwidth, {"cv": "auto-cv", "rot": "auto-rot"}, "--bandwidth")
    spec = KernelRegSpec(args.kernel, args.degree, bw)
    curve, smoother = localpoly_fit(data, spec, _grid(data.x1(), args.grid))
    info = kernel_fit_info(data, smoother)
    r2 = _r2(data.y, info.fitted)
    extra = {"kernel": args.kernel, "degree": args.degree, "bandwidth_rule": args.bandwidth, "trace": info.trace,
             "sigma2": info.sigma2}
    FitSummary("local-polynomial", data.n, info.h, {}, r2, info.trace, extra).write(run.path(".json"))
    emit_curve(curve, run.path(".tsv"))
    if args.plot:
        from .plotting import plot_curve

        plot_curve(curve, data.x1(), data.y, run.path(".png"), data.names[0])
    run.finish()


def cmd_fit_spline(args) -> None:
    data = _univariate(args, _load(args))
    run = Run(args, args.input)
    lam = _positive_or(args.lam, {"gcv": "auto-gcv"}, "--lambda")
    spec = SplineSpec(args.degree, args.knots, lam)
    curve, fit = spline_fit(data, spec, _grid(data.x1(), args.grid))
    names = [f"b{j}" for j in range(fit.degree + 1)] + [f"knot{c + 1}" for c in range(fit.knots.size)]
    extra = {"lambda": fit.lam, "edf": fit.edf, "gcv": fit.gcv, "knots": fit.knots, "sigma2": fit.sigma2}
    FitSummary("penalized-spline", data.n, fit.lam, dict(zip(names, fit.coeffs)), _r2(data.y, fit.fitted),
               fit.edf, extra).write(run.path(".json"))
    emit_curve(curve, run.path(".tsv"))
    if args.plot:
        from .plotting import plot_curve

        plot_curve(curve, data.x1(), data.y, run.path(".png"), data.names[0])
    run.finish()


def _parse_terms(text: str) -> dict[str, str]:
    terms = {}
    for item in filter(None, (t.strip() for t in text.split(","))):
        name, sep, kind = item.rpartition(":")
        if not sep or not name:
            raise UsageError(f"--terms entries look like name:linear or name:smooth, got {item!r}")
        terms[name] = kind
    return terms


def cmd_fit_additive(args) -> None:
    data = _load(args)
    run = Run(args, args.input)
    terms = _parse_terms(args.terms)
    lam = _positive_or(args.lam, {"gcv": "auto-gcv"}, "--lambda")
    smoothers = {t: SplineSpec(args.spline_degree, args.knots, lam) for t, k in terms.items() if k == "smooth"}
    fit = backfit(data, AdditiveSpec(terms, smoothers, args.max_iter))
    coeffs = {"intercept": fit.intercept, **fit.linear_coeffs}
    extra = {"terms": terms, "iterations": fit.iterations, "converged": fit.converged, "smoothing": fit.smoothing}
    FitSummary("additive-backfit", data.n, None, coeffs, fit.r_squared, fit.edf, extra).write(run.path(".json"))
    for name, curve in fit.components.items():
        emit_curve(curve, run.path(f".{name}.tsv"))
    if args.plot and fit.components:
        from .plotting import plot_components

        plot_components(fit.components, run.path(".png"))
    run.finish()


def cmd_fit_sim(args) -> None:
    data = _load(args)
    if args.covariates:
        data = data.select([c.strip() for c in args.covariates.split(",") if c.strip()])
    run = Run(args, args.input)
    fit = sim_fit(data, opts=SimOptions(restarts=args.restarts, seed=args.seed))
    first_one = fit.beta_first_one
    extra = {
        "beta_unit_norm": dict(zip(fit.names, fit.beta)),
        "beta_first_one": None if first_one is None else dict(zip(fit.names, first_one)),
        "h_link": fit.h_link,
        "objective": fit.objective,
    }
    FitSummary("single-index", data.n, fit.h_link, dict(zip(fit.names, fit.beta)), fit.r_squared, None,
               extra).write(run.path(".json"))
    emit_curve(fit.link, run.path(".tsv"))
    if args.plot:
        from .plotting import plot_curve

        plot_curve(fit.link, fit.index_values, data.y, run.path(".png"), "index")
    run.finish()


def cmd_fit_robust(args) -> None:
    data = _univariate(args, _load(args))
    run = Run(args, args.input)
    cfg = RobustConfig(args.bandwidth, args.c, args.max_iter, args.scale, args.kernel)
    fit = robust_fit(data, cfg)
    extra = {
        "c": cfg.c,
        "scale_method": cfg.scale,
        "scale": fit.scale_est,
        "iterations": fit.iterations,
        "degenerate_scale": fit.degenerate_scale,
        "min_weight": float(np.min(fit.robust_weights)),
        "max_weight": float(np.max(fit.robust_weights)),
        "sigma2": fit.sigma2,
        "df_error": fit.df_err,
    }
    FitSummary("robust-local-linear", data.n, cfg.bandwidth, {}, _r2(fit.y, fit.fitted), fit.trace,
               extra).write(run.path(".json"))
    emit_curve(fit.curve, run.path(".tsv"))
    write_table(run.path(".obs.tsv"), fit.table())
    if args.plot:
        from .plotting import plot_curve

        plot_curve(fit.curve, fit.x, fit.y, run.path(".png"), data.names[0])
    run.finish()


def _outlier(text: str) -> tuple[float, float]:
    try:
        a, b = text.split(":")
        return float(a), float(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"outliers look like x:y, got {text!r}") from None


def _recipe(args, seed: int) -> SimRecipe:
    truth = args.recipe
    if truth not in TRUTHS:
        try:
            truth = tuple(float(c) for c in truth.split(","))
        except ValueError:
            raise UsageError(f"--recipe must be one of {sorted(TRUTHS)} or comma-separated coefficients") from None
    outliers = REFERENCE_OUTLIERS if args.outlier is None else tuple(args.outlier)
    return SimRecipe(args.n, truth, args.noise_sd, outliers, seed)


def cmd_simulate(args) -> None:
    out = Path(args.out)
    args.outdir = str(out.parent)
    args.prefix = args.prefix or out.stem
    run = Run(args)
    data, truth = generate(_recipe(args, args.seed))
    run.outputs.append(out)
    write_csv(out, {"x": data.x1(), "y": data.y, "truth": truth})
    run.finish()


def cmd_compare_robust(args) -> None:
    run = Run(args)
    window = (args.window[0], args.window[1])
    base = _recipe(args, args.seed_start)
    seeds = range(args.seed_start, args.seed_start + args.seeds)
    results = compare_robust(seeds, base, args.bandwidth, window)
    write_table(
        run.path(".tsv"),
        {
            "seed": [r.seed for r in results],
            "rmse_kernel": [r.rmse_kernel for r in results],
            "rmse_spline": [r.rmse_spline for r in results],
            "rmse_robust": [r.rmse_robust for r in results],
        },
    )
    summary = summarize(results)
    summary.update({"schema": 1, "method": "compare-robust", "bandwidth": args.bandwidth, "window": window})
    run.path(".json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    if args.plot:
        from .plotting import plot_comparison

        data, truth, fits = fits_for_seed(base, args.bandwidth)
        plot_comparison(data.x1(), data.y, truth, fits, run.path(".png"), window)
    log.info("robust beat kernel in %d/%d seeds", summary["robust_beats_kernel"], summary["seeds"])
    run.finish()


def _r2(y, fitted) -> float:
    if np.ptp(y) == 0 or np.ptp(fitted) == 0:
        return 0.0
    return float(np.corrcoef(y, fitted)[0, 1] ** 2)


def _window(text: str) -> tuple[float, float]:
    a, b = _outlier(text)
    if not a < b:
        raise argparse.ArgumentTypeError("--window needs lo:hi with lo < hi")
    return a, b


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="smoothkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"smoothkit {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    parser.set_defaults(subparsers=sub.choices)

    def common(p, with_input=True, univariate=True):
        if with_input:
            p.add_argument("input", help="input CSV with a header line")
            p.add_argument("--response", default="y", help="response column (default: y)")
            p.add_argument("--factor", action="append", default=[], help="0/1 factor column (repeatable)")
            if univariate:
                p.add_argument("--x", help="covariate column (default: first non-response column)")
        p.add_argument("--outdir", default=".", help="output directory (default: .)")
        p.add_argument("--prefix", help="output file prefix (default: command name)")
        p.add_argument("--plot", action="store_true", help="also render a PNG figure")

    p = sub.add_parser("fit-poly", help="polynomial OLS fit with F-test")
    common(p)
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--anova-against", type=int, help="second degree for a nested F-test")
    p.add_argument("--grid", type=int, default=100, help="grid points for the figure")
    p.set_defaults(func=cmd_fit_poly)

    p = sub.add_parser("diagnose", help="residual and Q-Q diagnostics of a polynomial fit")
    common(p)
    p.add_argument("--degree", type=int, default=1)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("fit-kernel", help="Nadaraya-Watson / local polynomial regression")
    common(p)
    p.add_argument("--kernel", choices=KERNEL_NAMES, default="gaussian")
    p.add_argument("--degree", type=int, default=1, help="local polynomial degree 0..3")
    p.add_argument("--bandwidth", default="cv", help="value, 'cv' or 'rot' (default: cv)")
    p.add_argument("--grid", type=int, default=100, help="number of grid points")
    p.set_defaults(func=cmd_fit_kernel)

    p = sub.add_parser("fit-spline", help="penalized truncated-power spline")
    common(p)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--knots", type=int, default=10)
    p.add_argument("--lambda", dest="lam", default="gcv", help="value or 'gcv' (default: gcv)")
    p.add_argument("--grid", type=int, default=100)
    p.set_defaults(func=cmd_fit_spline)

    p = sub.add_parser("fit-additive", help="partially linear / additive model by backfitting")
    common(p, univariate=False)
    p.add_argument("--terms", required=True, help='e.g. "educ:linear,income:smooth"')
    p.add_argument("--spline-degree", type=int, default=3)
    p.add_argument("--knots", type=int, default=10)
    p.add_argument("--lambda", dest="lam", default="gcv")
    p.add_argument("--max-iter", type=int, default=50)
    p.set_defaults(func=cmd_fit_additive)

    p = sub.add_parser("fit-sim", help="single-index model")
    common(p, univariate=False)
    p.add_argument("--covariates", help="comma-separated index covariates (default: all)")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_fit_sim)

    p = sub.add_parser("fit-robust", help="Huber-reweighted local-linear smoother")
    common(p)
    p.add_argument("--bandwidth", type=float, required=True)
    p.add_argument("--c", type=float, default=1.345)
    p.add_argument("--max-iter", type=int, default=8)
    p.add_argument("--scale", choices=("mad", "iqr"), default="mad")
    p.add_argument("--kernel", choices=KERNEL_NAMES, default="gaussian")
    p.set_defaults(func=cmd_fit_robust)

    def recipe_flags(p, default_outliers):
        p.add_argument("--recipe", default="logistic20", help=f"one of {sorted(TRUTHS)} or polynomial coefficients")
        p.add_argument("--n", type=int, default=100)
        p.add_argument("--noise-sd", type=float, default=0.05)
        p.add_argument("--outlier", type=_outlier, action="append", default=default_outliers,
                       help="x:y point appended verbatim (repeatable)")

    p = sub.add_parser("simulate", help="write a seeded synthetic dataset")
    recipe_flags(p, [])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--prefix", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_simulate, outdir=".", plot=False)

    p = sub.add_parser("compare-robust", help="kernel vs spline vs robust RMSE over seeds")
    common(p, with_input=False)
    recipe_flags(p, None)
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--seed-start", type=int, default=0)
    p.add_argument("--bandwidth", type=float, default=REFERENCE_BANDWIDTH)
    p.add_argument("--window", type=_window, default=OUTLIER_WINDOW, help="x interval lo:hi for the RMSE")
    p.set_defaults(func=cmd_compare_robust)
    return parser


def run(argv=None) -> int:
    """Parse ``argv`` and dispatch; returns the process exit code."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s", stream=sys.stderr)
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_help(sys.stderr)
        return 2
    try:
        args, extra = parser.parse_known_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return 2
        if extra:
            args.subparsers[args.command].print_help(sys.stderr)
            raise UsageError(f"unrecognized arguments for {args.command}: {' '.join(extra)}")
        args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SmoothkitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
