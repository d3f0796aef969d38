"""Penalized regression splines on a truncated power basis.

The roughness penalty is realized as a ridge penalty on the knot
coefficients; the polynomial part is unpenalized. The smoothing parameter
can be fixed or chosen by generalized cross-validation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .dataio import Dataset, FitCurve
from .errors import DomainError, KnotError, SelectionError, SmoothkitError
from .kernelreg import TVALUE, default_grid
from .numerics import WlsSolution, smoother_bands, wls_solve

GCV_GRID = np.geomspace(1e-4, 1e6, 40)


@dataclass(frozen=True)
class SplineSpec:
    degree: int = 3
    num_knots: int = 10
    lam: float | str = "auto-gcv"
    knots: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.degree not in (1, 2, 3):
            raise DomainError(f"spline degree must be 1, 2 or 3, got {self.degree}")
        if self.knots is not None:
            object.__setattr__(self, "knots", tuple(float(k) for k in self.knots))
            object.__setattr__(self, "num_knots", len(self.knots))
        if self.num_knots < 0:
            raise DomainError(f"number of knots must be nonnegative, got {self.num_knots}")
        if isinstance(self.lam, str):
            if self.lam != "auto-gcv":
                raise DomainError(f"lambda must be >= 0 or 'auto-gcv', got {self.lam!r}")
        elif not self.lam >= 0:
            raise DomainError(f"lambda must be nonnegative, got {self.lam}")


def place_knots(x, spec: SplineSpec) -> NDArray[np.float64]:
    """Interior knots: explicit ones from ``spec`` or quantiles c/(C+1) of unique x."""
    x = np.asarray(x, dtype=float)
    lo, hi = float(np.min(x)), float(np.max(x))
    C = spec.num_knots
    if C > x.size - spec.degree - 1:
        raise KnotError(f"{C} knots with degree {spec.degree} need more than {C + spec.degree + 1} points")
    if spec.knots is not None:
        knots = np.asarray(spec.knots, dtype=float)
    elif C == 0:
        knots = np.empty(0)
    else:
        knots = np.quantile(np.unique(x), np.arange(1, C + 1) / (C + 1))
    if knots.size and (np.any(np.diff(knots) <= 0)):
        raise KnotError(f"knots collapse onto each other ({knots.size} requested); use fewer knots")
    if knots.size and (knots[0] <= lo or knots[-1] >= hi):
        raise KnotError(f"knots must lie strictly inside ({lo:.6g}, {hi:.6g})")
    return knots


def _truncated(x, knots, power):
    diff = x[:, None] - knots[None, :]
    if power == 0:
        return (diff > 0).astype(float)
    return np.where(diff > 0, diff, 0.0) ** power


def spline_basis(x, spec: SplineSpec, knots=None) -> NDArray[np.float64]:
    """Design ``[1, x, ..., x^p, (x-t_1)_+^p, ..., (x-t_C)_+^p]``."""
    x = np.asarray(x, dtype=float)
    knots = place_knots(x, spec) if knots is None else np.asarray(knots, dtype=float)
    p = spec.degree
    return np.hstack([np.vander(x, p + 1, increasing=True), _truncated(x, knots, p)])


def spline_basis_deriv(x, degree: int, knots) -> NDArray[np.float64]:
    """First derivative of each basis column."""
    x = np.asarray(x, dtype=float)
    knots = np.asarray(knots, dtype=float)
    poly = np.zeros((x.size, degree + 1))
    for j in range(1, degree + 1):
        poly[:, j] = j * x ** (j - 1)
    return np.hstack([poly, degree * _truncated(x, knots, degree - 1)])


def _penalty_mask(degree: int, n_knots: int):
    return np.r_[np.zeros(degree + 1, dtype=bool), np.ones(n_knots, dtype=bool)]


def _solve(B, y, degree, knots, lam) -> WlsSolution:
    return wls_solve(B, y, np.ones(y.size), ridge=float(lam), penalized=_penalty_mask(degree, knots.size))


@dataclass(frozen=True, eq=False)
class SplineFit:
    coeffs: NDArray[np.float64]
    lam: float
    edf: float
    gcv: float
    knots: NDArray[np.float64]
    degree: int
    fitted: NDArray[np.float64]
    sigma2: float

    def predict(self, x) -> NDArray[np.float64]:
        x = np.asarray(x, dtype=float)
        return spline_basis(x, SplineSpec(self.degree, self.knots.size, self.lam), self.knots) @ self.coeffs

    def derivative(self, x) -> NDArray[np.float64]:
        return spline_basis_deriv(x, self.degree, self.knots) @ self.coeffs


def gcv_score(rss: float, trace: float, n: int) -> float:
    """(RSS/n) / (1 - trace/n)^2, infinite when trace >= n."""
    if trace >= n:
        return np.inf
    return (rss / n) / (1.0 - trace / n) ** 2


def lambda_gcv(data: Dataset, spec: SplineSpec, candidates=None):
    """GCV over candidate penalties; returns ``(lam_opt, scores)``.

    Scores equal to the minimum within 1e-12 of the response variance count
    as ties, which go to the larger penalty.
    """
    x, y = data.x1(), data.y
    cands = GCV_GRID if candidates is None else np.asarray(candidates, dtype=float)
    if cands.size < 1 or np.any(~(cands >= 0)):
        raise DomainError("candidate penalties must be nonnegative")
    knots = place_knots(x, spec)
    B = spline_basis(x, spec, knots)
    scores = np.full(cands.size, np.inf)
    for i, lam in enumerate(cands):
        try:
            sol = _solve(B, y, spec.degree, knots, lam)
        except SmoothkitError:
            continue
        scores[i] = gcv_score(sol.rss, sol.trace, y.size)
    if not np.any(np.isfinite(scores)):
        raise SelectionError("smoother trace reaches n for every candidate penalty")
    tol = 1e-12 * float(np.var(y))
    tied = np.flatnonzero(scores <= np.min(scores) + tol)
    best = tied[np.argmax(cands[tied])]
    return float(cands[best]), scores


def spline_fit(data: Dataset, spec: SplineSpec, grid=None) -> tuple[FitCurve, SplineFit]:
    """Fit the penalized spline and evaluate it, its derivative and bands on ``grid``."""
    x, y = data.x1(), data.y
    grid = default_grid(x) if grid is None else np.asarray(grid, dtype=float)
    lam = lambda_gcv(data, spec)[0] if spec.lam == "auto-gcv" else float(spec.lam)
    knots = place_knots(x, spec)
    B = spline_basis(x, spec, knots)
    sol = _solve(B, y, spec.degree, knots, lam)
    Bg = spline_basis(grid, spec, knots)
    rows = Bg @ sol.coef_map
    sigma2, _, se = smoother_bands(y, sol.fitted, sol.trace, rows)
    deriv = spline_basis_deriv(grid, spec.degree, knots) @ sol.beta
    curve = FitCurve.from_se(grid, Bg @ sol.beta, se, deriv, TVALUE)
    fit = SplineFit(
        sol.beta, lam, sol.trace, gcv_score(sol.rss, sol.trace, y.size), knots, spec.degree, sol.fitted, sigma2
    )
    return curve, fit
