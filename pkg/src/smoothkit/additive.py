"""Partially linear and additive models fitted by Gauss-Seidel backfitting."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .dataio import Dataset, FitCurve
from .errors import ExtrapolationError, SizeError, SmoothkitError, UsageError
from .kernelreg import TVALUE, KernelRegSpec, _local_maps, bandwidth_cv, bandwidth_rot
from .numerics import smoother_bands, wls_solve
from .splinereg import SplineSpec, _solve, lambda_gcv, place_knots, spline_basis

LINEAR, SMOOTH = "linear", "smooth"


@dataclass(frozen=True)
class AdditiveSpec:
    """Term designations in model order plus smoother settings.

    ``tol`` defaults to ``1e-6 * sd(y)`` when left as None.
    """

    terms: dict[str, str]
    smoothers: dict[str, SplineSpec | KernelRegSpec] = field(default_factory=dict)
    max_iter: int = 50
    tol: float | None = None

    def __post_init__(self):
        if not self.terms:
            raise UsageError("an additive model needs at least one term")
        for name, kind in self.terms.items():
            if kind not in (LINEAR, SMOOTH):
                raise UsageError(f"term {name!r} must be 'linear' or 'smooth', got {kind!r}")
        if self.max_iter < 1:
            raise UsageError("max_iter must be at least 1")

    def smoother(self, name: str):
        return self.smoothers.get(name, SplineSpec())


@dataclass(frozen=True, eq=False)
class AdditiveFit:
    intercept: float
    linear_coeffs: dict[str, float]
    components: dict[str, FitCurve]
    iterations: int
    converged: bool
    fitted: NDArray[np.float64]
    component_values: dict[str, NDArray[np.float64]]
    smoothing: dict[str, float]
    linear_means: dict[str, float]
    ranges: dict[str, tuple[float, float]]
    edf: float
    r_squared: float


class _TermSmoother:
    """Fixed linear smoother for one covariate, rebuilt when its parameter changes."""

    def __init__(self, name, x, spec):
        self.name = name
        self.x = x
        self.spec = spec
        self.grid = np.unique(x)
        self.param = None

    def select(self, r) -> float:
        data = Dataset.from_xy(self.x, r, self.name)
        if isinstance(self.spec, SplineSpec):
            if self.spec.lam == "auto-gcv":
                return lambda_gcv(data, self.spec)[0]
            return float(self.spec.lam)
        if self.spec.bandwidth == "auto-cv":
            return bandwidth_cv(data, self.spec)[0]
        if self.spec.bandwidth == "auto-rot":
            return bandwidth_rot(data)
        return float(self.spec.bandwidth)

    def build(self, param: float) -> None:
        self.param = param
        if isinstance(self.spec, SplineSpec):
            knots = place_knots(self.x, self.spec)
            B = spline_basis(self.x, self.spec, knots)
            M = _solve(B, np.zeros(self.x.size), self.spec.degree, knots, param).coef_map
            self.train = B @ M
            self.at_grid = spline_basis(self.grid, self.spec, knots) @ M
        else:
            k, p = self.spec.kernel, self.spec.degree
            self.train = _local_maps(self.x, self.x, k, param, p)[:, 0, :]
            self.at_grid = _local_maps(self.x, self.grid, k, param, p)[:, 0, :]
        self.trace = float(np.trace(self.train))


def _named(exc: SmoothkitError, name: str) -> SmoothkitError:
    try:
        return type(exc)(f"term {name!r}: {exc}")
    except TypeError:
        return exc


def backfit(data: Dataset, spec: AdditiveSpec) -> AdditiveFit:
    """Backfit ``y = b0 + sum linear + sum smooth`` with mean-centered smooth terms.

    Smoothing parameters are selected on the first cycle and re-selected
    once on the partial residuals after convergence; if any changes,
    cycling resumes with the new values (up to ``max_iter`` cycles in total).
    Non-convergence is reported through ``converged``, not raised.
    """
    y = data.y
    n = data.n
    for name in spec.terms:
        data.column(name)
    lin_names = [t for t, kind in spec.terms.items() if kind == LINEAR]
    smooth_names = [t for t, kind in spec.terms.items() if kind == SMOOTH]
    for name in smooth_names:
        if data.factor_mask[data.names.index(name)]:
            raise UsageError(f"factor column {name!r} must be a linear term")
    needed = len(lin_names) + 1 + 5 * len(smooth_names)
    if n <= needed:
        raise SizeError(f"additive model needs more than {needed} observations, got {n}")

    tol = spec.tol if spec.tol is not None else 1e-6 * float(np.std(y, ddof=1))
    ybar = float(np.mean(y))
    Xl = np.column_stack([data.column(t) for t in lin_names]) if lin_names else np.empty((n, 0))
    lin_means = Xl.mean(axis=0)
    Xc = Xl - lin_means
    lin_map = wls_solve(Xc, y, np.ones(n)).coef_map if lin_names else None

    smoothers = {t: _TermSmoother(t, data.column(t), spec.smoother(t)) for t in smooth_names}
    f = {t: np.zeros(n) for t in smooth_names}
    lin = np.zeros(n)
    beta = np.zeros(len(lin_names))
    last = {}
    reselected = False
    converged = False
    it = 0
    while it < spec.max_iter:
        it += 1
        change = 0.0
        if lin_names:
            r = y - ybar - sum(f.values(), np.zeros(n))
            beta = lin_map @ r
            new = Xc @ beta
            change = max(change, float(np.max(np.abs(new - lin))))
            lin = new
        for t in smooth_names:
            sm = smoothers[t]
            r = y - ybar - lin - sum((f[s] for s in smooth_names if s != t), np.zeros(n))
            try:
                if sm.param is None:
                    sm.build(sm.select(r))
                g = sm.train @ r
            except SmoothkitError as exc:
                raise _named(exc, t) from exc
            last[t] = (r, sm.train, sm.at_grid, sm.trace, sm.param)
            new = g - g.mean()
            change = max(change, float(np.max(np.abs(new - f[t]))))
            f[t] = new
        if change < tol:
            if reselected or not smooth_names:
                converged = True
                break
            reselected = True
            moved = False
            for t in smooth_names:
                sm = smoothers[t]
                r = y - ybar - lin - sum((f[s] for s in smooth_names if s != t), np.zeros(n))
                try:
                    param = sm.select(r)
                except SmoothkitError as exc:
                    raise _named(exc, t) from exc
                if not np.isclose(param, sm.param, rtol=1e-12, atol=0.0):
                    sm.build(param)
                    moved = True
            if not moved:
                converged = True
                break

    components = {}
    edf = 1.0 + len(lin_names)
    for t in smooth_names:
        r, train, at_grid, trace, _ = last[t]
        g = train @ r
        try:
            _, _, se = smoother_bands(r, g, trace, at_grid)
        except SmoothkitError as exc:
            raise _named(exc, t) from exc
        components[t] = FitCurve.from_se(smoothers[t].grid, at_grid @ r - g.mean(), se, tvalue=TVALUE)
        edf += trace - 1.0

    fitted = ybar + lin + sum(f.values(), np.zeros(n))
    intercept = ybar - float(lin_means @ beta) if lin_names else ybar
    tss = float(np.sum((y - ybar) ** 2))
    r2 = 0.0 if tss == 0 else min(max(1.0 - float(np.sum((y - fitted) ** 2)) / tss, 0.0), 1.0)
    return AdditiveFit(
        intercept=intercept,
        linear_coeffs={t: float(b) for t, b in zip(lin_names, beta)},
        components=components,
        iterations=it,
        converged=converged,
        fitted=fitted,
        component_values=f,
        smoothing={t: float(last[t][4]) for t in smooth_names},
        linear_means={t: float(m) for t, m in zip(lin_names, lin_means)},
        ranges={t: (float(smoothers[t].grid[0]), float(smoothers[t].grid[-1])) for t in smooth_names},
        edf=float(edf),
        r_squared=r2,
    )


def predict_additive(fit: AdditiveFit, xnew: dict[str, float]) -> float:
    """Intercept + linear part + smooth components interpolated on their grids."""
    value = fit.intercept
    for t, b in fit.linear_coeffs.items():
        value += b * float(xnew[t])
    for t, curve in fit.components.items():
        v = float(xnew[t])
        lo, hi = fit.ranges[t]
        if not lo <= v <= hi:
            raise ExtrapolationError(f"{t}={v:.6g} outside training range [{lo:.6g}, {hi:.6g}]")
        value += float(curve.interpolate(v))
    return value
