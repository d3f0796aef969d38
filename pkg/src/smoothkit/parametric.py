"""Polynomial regression baselines, nested F-tests and residual diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from numpy.typing import NDArray

from .dataio import Dataset
from .errors import DomainError, RankError, SizeError, UsageError
from .numerics import f_sf, norm_ppf, wls_solve

MAX_DEGREE = 8


@dataclass(frozen=True, eq=False)
class PolyFit:
    degree: int
    coeffs: NDArray[np.float64]
    r_squared: float
    f_stat: float
    p_value: float
    residuals: NDArray[np.float64]
    fitted: NDArray[np.float64]
    rss: float
    tss: float
    hat_diag: NDArray[np.float64]
    n: int

    @property
    def df_resid(self) -> int:
        return self.n - self.degree - 1

    @property
    def sigma2(self) -> float:
        return self.rss / self.df_resid

    def predict(self, x) -> NDArray[np.float64]:
        return Polynomial(self.coeffs)(np.asarray(x, dtype=float))


def _scaled_vandermonde(x: NDArray, degree: int):
    lo, hi = float(np.min(x)), float(np.max(x))
    if hi == lo:
        raise RankError("covariate is constant; polynomial design is rank deficient")
    center, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    t = (x - center) / half
    return np.vander(t, degree + 1, increasing=True), center, half


def fit_poly(data: Dataset, degree: int) -> PolyFit:
    """OLS fit of y on (1, x, ..., x^degree).

    The design is built on x rescaled to [-1, 1]; coefficients are mapped
    back to the raw x scale before returning.
    """
    if not 1 <= degree <= MAX_DEGREE:
        raise DomainError(f"degree must be in 1..{MAX_DEGREE}, got {degree}")
    x, y = data.x1(), data.y
    n = data.n
    if n <= degree + 1:
        raise SizeError(f"degree {degree} needs more than {degree + 1} observations, got {n}")
    V, center, half = _scaled_vandermonde(x, degree)
    sol = wls_solve(V, y, np.ones(n))
    raw = Polynomial(sol.beta)(Polynomial([-center / half, 1.0 / half]))
    coeffs = np.zeros(degree + 1)
    coeffs[: raw.coef.size] = raw.coef

    fitted = sol.fitted
    resid = y - fitted
    rss = float(resid @ resid)
    tss = float(np.sum((y - y.mean()) ** 2))
    if tss == 0.0:
        r2, f_stat, p = 0.0, 0.0, 1.0
    else:
        r2 = min(max(1.0 - rss / tss, 0.0), 1.0)
        if rss == 0.0:
            f_stat, p = np.inf, 0.0
        else:
            f_stat = ((tss - rss) / degree) / (rss / (n - degree - 1))
            p = f_sf(max(f_stat, 0.0), degree, n - degree - 1)
    return PolyFit(degree, coeffs, r2, float(f_stat), p, resid, fitted, rss, tss, sol.hat_diag, n)


def anova_nested(small: PolyFit, big: PolyFit, n: int) -> tuple[float, float]:
    """Partial F-test of a lower-degree fit against a higher-degree one."""
    if small.n != n or big.n != n:
        raise UsageError(f"fits were made on n={small.n} and n={big.n}, expected {n}")
    if small.degree >= big.degree:
        raise UsageError("small model must have lower degree than big model")
    df1 = big.degree - small.degree
    df2 = n - big.degree - 1
    gain = max(small.rss - big.rss, 0.0)
    if gain == 0.0:
        return 0.0, 1.0
    if big.rss == 0.0:
        return float("inf"), 0.0
    f_stat = (gain / df1) / (big.rss / df2)
    return float(f_stat), f_sf(f_stat, df1, df2)


@dataclass(frozen=True, eq=False)
class Diagnostics:
    """Per-observation data behind residual-vs-fitted and normal Q-Q plots."""

    fitted: NDArray[np.float64]
    resid: NDArray[np.float64]
    std_resid: NDArray[np.float64]
    qq_theoretical: NDArray[np.float64]
    qq_sample: NDArray[np.float64]

    def columns(self) -> dict[str, NDArray[np.float64]]:
        return {
            "fitted": self.fitted,
            "resid": self.resid,
            "std_resid": self.std_resid,
            "qq_theoretical": self.qq_theoretical,
            "qq_sample": self.qq_sample,
        }


def diagnostics(fit: PolyFit) -> Diagnostics:
    n = fit.n
    denom = fit.sigma2 * (1.0 - fit.hat_diag)
    with np.errstate(divide="ignore", invalid="ignore"):
        std = np.where(denom > 0, fit.residuals / np.sqrt(denom), 0.0)
    probs = (np.arange(1, n + 1) - 0.5) / n
    return Diagnostics(fit.fitted, fit.residuals, std, norm_ppf(probs), np.sort(std))
