"""Weighted least squares, smoother-matrix helpers and distribution functions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import linalg, special

from .errors import DegeneracyError, DomainError, RankError, UsageError

RCOND_MIN = 1e-12


@dataclass(frozen=True, eq=False)
class WlsSolution:
    """Solution of a (possibly ridge-penalized) weighted least-squares problem.

    ``coef_map`` is the matrix ``M`` with ``beta = M @ y``; fitted values at
    any other design rows ``G`` are ``G @ M @ y``, which is how callers get
    smoother rows for standard errors.
    """

    beta: NDArray[np.float64]
    fitted: NDArray[np.float64]
    hat_diag: NDArray[np.float64]
    rss: float
    coef_map: NDArray[np.float64]

    @property
    def trace(self) -> float:
        return float(np.sum(self.hat_diag))


def _equilibrated_cholesky(A: NDArray, check_rank: bool):
    d = np.sqrt(np.diag(A))
    if np.any(~(d > 0)):
        zero = int(np.sum(~(d > 0)))
        raise RankError(f"normal matrix has {zero} all-zero column(s) of {A.shape[0]}")
    scaled = A / np.outer(d, d)
    if check_rank:
        ev = np.linalg.eigvalsh(scaled)
        rcond = ev[0] / ev[-1] if ev[-1] > 0 else 0.0
        if rcond < RCOND_MIN:
            raise RankError(
                f"normal matrix with {A.shape[0]} columns is singular to working precision "
                f"(rcond={rcond:.3g})"
            )
    try:
        factor = linalg.cho_factor(scaled, lower=True, check_finite=False)
    except linalg.LinAlgError:
        raise RankError(f"normal matrix with {A.shape[0]} columns is not positive definite") from None
    return factor, d


def wls_solve(design, y, w, ridge: float = 0.0, penalized=None) -> WlsSolution:
    """Minimize ``sum w_i (y_i - design_i @ b)^2 + ridge * sum_{j penalized} b_j^2``.

    ``penalized`` is a boolean mask over columns (default: all columns).
    The normal equations are Jacobi-equilibrated then Cholesky-factored;
    with ``ridge == 0`` a reciprocal condition below 1e-12 raises
    :class:`RankError`.
    """
    X = np.asarray(design, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    n, q = X.shape
    if y.shape != (n,) or w.shape != (n,):
        raise UsageError(f"design has {n} rows but y/w have shapes {y.shape}/{w.shape}")
    if np.any(w < 0) or not np.any(w > 0):
        raise UsageError("weights must be nonnegative with at least one positive")
    if ridge < 0:
        raise DomainError(f"ridge must be nonnegative, got {ridge}")
    pen = np.ones(q, dtype=bool) if penalized is None else np.asarray(penalized, dtype=bool)

    XtW = X.T * w
    A = XtW @ X
    if ridge > 0:
        A[np.diag_indices(q)] += ridge * pen
    factor, d = _equilibrated_cholesky(A, check_rank=ridge == 0)
    M = linalg.cho_solve(factor, XtW / d[:, None], check_finite=False) / d[:, None]
    beta = M @ y
    fitted = X @ beta
    hat_diag = np.einsum("ij,ji->i", X, M)
    rss = float(np.sum(w * (y - fitted) ** 2))
    return WlsSolution(beta, fitted, hat_diag, rss, M)


class LocalSupportError(ValueError):
    """Raised by :func:`local_coef_maps` with the indices of unsupported problems."""

    def __init__(self, indices):
        super().__init__(f"{len(indices)} local problems lack support")
        self.indices = indices


def local_coef_maps(designs, weights, min_positive: int) -> NDArray[np.float64]:
    """Batched weighted LS coefficient maps for many small local problems.

    ``designs`` has shape (m, n, q) and ``weights`` (m, n). Returns an array
    of shape (m, q, n) whose slice ``[r]`` maps y to the local coefficients of
    problem ``r``. Problems with fewer than ``min_positive`` positive weights
    are reported through :class:`LocalSupportError`.
    """
    npos = np.sum(weights > 0, axis=1)
    bad = np.flatnonzero(npos < min_positive)
    if bad.size:
        raise LocalSupportError(bad)
    B = np.transpose(designs * weights[:, :, None], (0, 2, 1))
    A = B @ designs
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.sqrt(np.einsum("mii->mi", A))
        scaled = A / (d[:, :, None] * d[:, None, :])
        finite = np.all(np.isfinite(scaled), axis=(1, 2))
        scaled[~finite] = np.eye(A.shape[1])
        ev = np.linalg.eigvalsh(scaled)
        rcond = np.where(finite, ev[:, 0] / ev[:, -1], 0.0)
    if np.any(~(rcond >= RCOND_MIN)):
        worst = int(np.argmin(np.nan_to_num(rcond, nan=-1.0)))
        raise RankError(
            f"local normal matrix with {A.shape[1]} columns is singular to working precision "
            f"(problem {worst}, rcond={rcond[worst]:.3g})"
        )
    return np.linalg.solve(scaled, B / d[:, :, None]) / d[:, :, None]


def smoother_bands(y, fitted_train, trace: float, rows, weights=None):
    """Residual variance and pointwise standard errors of a linear smoother.

    ``rows`` holds the smoother weight vectors l(x) at the query points.
    With observation ``weights`` the residual sum of squares and the error
    degrees of freedom are weighted as ``sum w r^2 / (sum w - trace)``.
    """
    y = np.asarray(y, dtype=float)
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)
    df_err = float(np.sum(w) - trace)
    if df_err <= 1e-8 * y.shape[0]:
        raise DegeneracyError(
            f"smoother leaves {df_err:.3g} error degrees of freedom (trace {trace:.6g}, n {y.shape[0]})"
        )
    sigma2 = float(np.sum(w * (y - fitted_train) ** 2) / df_err)
    se = np.sqrt(sigma2 * np.sum(np.asarray(rows) ** 2, axis=1))
    return sigma2, df_err, se


def f_cdf(f: float, df1: float, df2: float) -> float:
    """P(F <= f) for the F distribution with (df1, df2) degrees of freedom."""
    if not (df1 > 0 and df2 > 0):
        raise DomainError(f"degrees of freedom must be positive, got ({df1}, {df2})")
    if f <= 0:
        return 0.0
    if np.isinf(f):
        return 1.0
    return float(special.betainc(df1 / 2.0, df2 / 2.0, df1 * f / (df1 * f + df2)))


def f_sf(f: float, df1: float, df2: float) -> float:
    """Upper tail P(F > f), computed without cancellation."""
    if not (df1 > 0 and df2 > 0):
        raise DomainError(f"degrees of freedom must be positive, got ({df1}, {df2})")
    if f <= 0:
        return 1.0
    if np.isinf(f):
        return 0.0
    return float(special.betainc(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f)))


def norm_ppf(p):
    """Standard normal quantile function."""
    return special.ndtri(p)
