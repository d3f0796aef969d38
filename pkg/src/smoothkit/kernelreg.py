"""Nadaraya-Watson and local polynomial regression.

All estimators here are linear smoothers: the fit at x is ``l(x) @ y``.
The smoother rows drive the standard errors and the 95% bands
(``fit +/- 2 se``), and exact leave-one-out cross-validation refits each
deleted point from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .dataio import Dataset, FitCurve
from .errors import DomainError, NeighborhoodError, SelectionError, SizeError, SmoothkitError
from .kernels import KernelSpec, get_kernel
from .numerics import LocalSupportError, local_coef_maps, smoother_bands

TVALUE = 2.0
MAX_DEGREE = 3
CV_GRID_SIZE = 30
_CHUNK = 512


@dataclass(frozen=True)
class KernelRegSpec:
    """Kernel, local polynomial degree and bandwidth (number, "auto-cv" or "auto-rot")."""

    kernel: KernelSpec = KernelSpec("gaussian")
    degree: int = 1
    bandwidth: float | str = "auto-cv"

    def __post_init__(self):
        object.__setattr__(self, "kernel", get_kernel(self.kernel))
        if self.degree not in range(MAX_DEGREE + 1):
            raise DomainError(f"local polynomial degree must be in 0..{MAX_DEGREE}, got {self.degree}")
        if isinstance(self.bandwidth, str):
            if self.bandwidth not in ("auto-cv", "auto-rot"):
                raise DomainError(f"bandwidth must be positive or 'auto-cv'/'auto-rot', got {self.bandwidth!r}")
        elif not self.bandwidth > 0:
            raise DomainError(f"bandwidth must be positive, got {self.bandwidth}")


def _local_maps(x, queries, kernel: KernelSpec, h: float, degree: int, loo: bool = False):
    """Coefficient maps (m, degree+1, n) of the local fits at ``queries``.

    Coefficients are on the scaled basis ((x_i - x)/h)^j; with ``loo`` the
    query ``r`` drops training point ``r`` (queries must equal ``x``).
    """
    x = np.asarray(x, dtype=float)
    queries = np.asarray(queries, dtype=float)
    out = np.empty((queries.size, degree + 1, x.size))
    for start in range(0, queries.size, _CHUNK):
        q = queries[start : start + _CHUNK]
        u = (x[None, :] - q[:, None]) / h
        w = kernel(u)
        if loo:
            idx = np.arange(start, start + q.size)
            w[np.arange(q.size), idx] = 0.0
        designs = u[:, :, None] ** np.arange(degree + 1)
        try:
            out[start : start + q.size] = local_coef_maps(designs, w, degree + 1)
        except LocalSupportError as exc:
            bad = q[exc.indices[0]]
            raise NeighborhoodError(
                f"fewer than {degree + 1} points with positive {kernel.name} weight "
                f"within bandwidth {h:.6g} of x={bad:.6g}"
            ) from None
    return out


@dataclass(frozen=True, eq=False)
class LinearSmoother:
    """Local polynomial smoother on fixed training x; ``f(x) = weights(x) @ y``."""

    x: NDArray[np.float64]
    kernel: KernelSpec
    h: float
    degree: int

    def weights(self, queries) -> NDArray[np.float64]:
        """Rows l(x) for each query point."""
        return _local_maps(self.x, np.atleast_1d(queries), self.kernel, self.h, self.degree)[:, 0, :]

    def deriv_weights(self, queries) -> NDArray[np.float64]:
        if self.degree < 1:
            raise DomainError("derivative needs local degree >= 1")
        return _local_maps(self.x, np.atleast_1d(queries), self.kernel, self.h, self.degree)[:, 1, :] / self.h

    @property
    def trace(self) -> float:
        return float(np.trace(self.weights(self.x)))


def default_grid(x, n_points: int = 100) -> NDArray[np.float64]:
    return np.linspace(np.min(x), np.max(x), n_points)


def _curve(y, train_rows, grid, grid_rows, deriv=None):
    fitted = train_rows @ y
    trace = float(np.trace(train_rows))
    sigma2, df_err, se = smoother_bands(y, fitted, trace, grid_rows)
    fit = grid_rows @ y
    return FitCurve.from_se(grid, fit, se, deriv, TVALUE), sigma2, trace


def nw_fit(data: Dataset, kernel: KernelSpec | str, h: float, grid=None) -> FitCurve:
    """Nadaraya-Watson estimate: kernel-weighted average of the responses."""
    kernel = get_kernel(kernel)
    if not h > 0:
        raise DomainError(f"bandwidth must be positive, got {h}")
    x, y = data.x1(), data.y
    grid = default_grid(x) if grid is None else np.asarray(grid, dtype=float)

    def rows(points):
        w = kernel((points[:, None] - x[None, :]) / h)
        tot = w.sum(axis=1)
        empty = np.flatnonzero(tot <= 0)
        if empty.size:
            raise NeighborhoodError(
                f"no training point has positive {kernel.name} weight within bandwidth {h:.6g} "
                f"of x={points[empty[0]]:.6g}"
            )
        return w / tot[:, None]

    curve, _, _ = _curve(y, rows(x), grid, rows(grid))
    return curve


def resolve_bandwidth(data: Dataset, spec: KernelRegSpec) -> float:
    if spec.bandwidth == "auto-rot":
        return bandwidth_rot(data)
    if spec.bandwidth == "auto-cv":
        return bandwidth_cv(data, spec)[0]
    return float(spec.bandwidth)


def localpoly_fit(data: Dataset, spec: KernelRegSpec, grid=None) -> tuple[FitCurve, LinearSmoother]:
    """Local polynomial fit of degree ``spec.degree`` at each grid point.

    The intercept of the local fit estimates f(x); for degree >= 1 the
    linear coefficient estimates f'(x) and is returned as ``deriv``.
    """
    x, y = data.x1(), data.y
    grid = default_grid(x) if grid is None else np.asarray(grid, dtype=float)
    h = resolve_bandwidth(data, spec)
    smoother = LinearSmoother(x, spec.kernel, h, spec.degree)
    train = _local_maps(x, x, spec.kernel, h, spec.degree)
    at_grid = _local_maps(x, grid, spec.kernel, h, spec.degree)
    deriv = at_grid[:, 1, :] @ y / h if spec.degree >= 1 else None
    curve, _, _ = _curve(y, train[:, 0, :], grid, at_grid[:, 0, :], deriv)
    return curve, smoother


@dataclass(frozen=True, eq=False)
class KernelFitInfo:
    """Scalar summaries of a kernel fit for reporting."""

    h: float
    trace: float
    sigma2: float
    fitted: NDArray[np.float64]


def kernel_fit_info(data: Dataset, smoother: LinearSmoother) -> KernelFitInfo:
    rows = smoother.weights(smoother.x)
    fitted = rows @ data.y
    trace = float(np.trace(rows))
    sigma2, _, _ = smoother_bands(data.y, fitted, trace, rows[:1])
    return KernelFitInfo(smoother.h, trace, sigma2, fitted)


def bandwidth_rot(data: Dataset) -> float:
    """Normal-reference bandwidth (4 sd^5 / 3n)^(1/5)."""
    x = data.x1() if isinstance(data, Dataset) else np.asarray(data, dtype=float)
    return rot_from_values(x)


def rot_from_values(x) -> float:
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 2:
        raise SizeError(f"rule-of-thumb bandwidth needs n >= 2, got {n}")
    sd = float(np.std(x, ddof=1))
    if not sd > 0:
        raise DomainError("rule-of-thumb bandwidth undefined for a constant covariate")
    return (4.0 * sd**5 / (3.0 * n)) ** 0.2


def default_bandwidth_grid(data: Dataset, size: int = CV_GRID_SIZE) -> NDArray[np.float64]:
    h0 = bandwidth_rot(data)
    return np.geomspace(0.1 * h0, 10.0 * h0, size)


def loo_cv_score(x, y, kernel: KernelSpec, h: float, degree: int) -> float:
    """Sum of squared deleted residuals, each from a refit without that point."""
    maps = _local_maps(x, x, kernel, h, degree, loo=True)
    pred = maps[:, 0, :] @ y
    return float(np.sum((y - pred) ** 2))


def bandwidth_cv(data: Dataset, spec: KernelRegSpec, grid_of_h=None):
    """Leave-one-out CV over candidate bandwidths.

    Returns ``(h_opt, scores)`` with scores aligned to the candidates.
    Candidates whose deleted-point fits are ill-posed score ``inf``; ties go
    to the smallest bandwidth.
    """
    x, y = data.x1(), data.y
    cands = default_bandwidth_grid(data) if grid_of_h is None else np.asarray(grid_of_h, dtype=float)
    if cands.size < 1 or np.any(~(cands > 0)):
        raise DomainError("candidate bandwidths must be positive")
    scores = np.full(cands.size, np.inf)
    for i, h in enumerate(cands):
        try:
            s = loo_cv_score(x, y, spec.kernel, float(h), spec.degree)
            scores[i] = s if np.isfinite(s) else np.inf
        except SmoothkitError:
            pass
    if not np.any(np.isfinite(scores)):
        raise SelectionError("every candidate bandwidth leaves some deleted-point fit ill-posed")
    # scores within rounding of the best count as ties
    best = float(np.min(scores))
    tol = 1e-12 * max(best, float(y @ y))
    tied = np.flatnonzero(scores <= best + tol)
    return float(np.min(cands[tied])), scores
