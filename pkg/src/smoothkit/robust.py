"""Robust local-linear smoothing by iteratively reweighted least squares.

Each pass fits a local-linear regression at every training x with weights
``K_h(x_j - x_i) * delta_j``, rescales the residuals by a robust scale
estimate and updates the observation weights ``delta`` with Huber's
psi(r)/r.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .dataio import Dataset, FitCurve
from .errors import DegenerateScaleError, DomainError, NeighborhoodError, SizeError
from .kernels import KernelSpec, get_kernel
from .numerics import smoother_bands

HUBER_C = 1.345
MAD_CONSISTENCY = 0.6745
IQR_CONSISTENCY = 1.349
TVALUE = 2.0
DELTA_TOL = 1e-8


@dataclass(frozen=True)
class RobustConfig:
    bandwidth: float
    c: float = HUBER_C
    max_iter: int = 8
    scale: str = "mad"
    kernel: KernelSpec = KernelSpec("gaussian")

    def __post_init__(self):
        object.__setattr__(self, "kernel", get_kernel(self.kernel))
        if not self.c > 0:
            raise DomainError(f"Huber constant must be positive, got {self.c}")
        if self.max_iter < 1:
            raise DomainError(f"max_iter must be at least 1, got {self.max_iter}")
        if not self.bandwidth > 0:
            raise DomainError(f"bandwidth must be positive, got {self.bandwidth}")
        if self.scale not in ("mad", "iqr"):
            raise DomainError(f"scale must be 'mad' or 'iqr', got {self.scale!r}")


@dataclass(frozen=True, eq=False)
class RobustFit:
    curve: FitCurve
    fitted: NDArray[np.float64]
    robust_weights: NDArray[np.float64]
    rescaled_residuals: NDArray[np.float64]
    scale_est: float
    iterations: int
    degenerate_scale: bool
    x: NDArray[np.float64]
    y: NDArray[np.float64]
    sigma2: float
    df_err: float
    trace: float

    def table(self) -> dict[str, NDArray[np.float64]]:
        """Per-observation columns x, y, yhat, rescaled_residual, weight."""
        return {
            "x": self.x,
            "y": self.y,
            "yhat": self.fitted,
            "rescaled_residual": self.rescaled_residuals,
            "weight": self.robust_weights,
        }


def huber_weight(r_scaled, c: float = HUBER_C):
    """1 inside ``|r| <= c``, ``c/|r|`` outside."""
    a = np.abs(np.asarray(r_scaled, dtype=float))
    with np.errstate(divide="ignore"):
        w = np.where(a <= c, 1.0, c / np.where(a > 0, a, 1.0))
    return float(w) if w.ndim == 0 else w


def robust_scale(residuals, method: str = "mad", floor: float = 0.0) -> float:
    """Normal-consistent robust scale: MAD/0.6745 or IQR/1.349.

    Raises :class:`DegenerateScaleError` when the estimate is ``<= floor``.
    """
    r = np.asarray(residuals, dtype=float)
    if r.size < 2:
        raise SizeError(f"robust scale needs at least 2 residuals, got {r.size}")
    if method == "mad":
        s = float(np.median(np.abs(r - np.median(r)))) / MAD_CONSISTENCY
    elif method == "iqr":
        q1, q3 = np.quantile(r, [0.25, 0.75])
        s = float(q3 - q1) / IQR_CONSISTENCY
    else:
        raise DomainError(f"unknown scale method {method!r}")
    if not s > floor:
        raise DegenerateScaleError(f"robust scale estimate {s:.3g} is degenerate")
    return s


def _local_linear_rows(x, kw, delta):
    """Smoother rows and slopes for local-linear fits at every training x.

    ``kw[i]`` holds the normalized kernel weights for target ``x[i]``.
    Uses the closed form of the weighted simple regression.
    """
    w = kw * delta[None, :]
    sw = w.sum(axis=1)
    if np.any(~(sw > 0)):
        i = int(np.flatnonzero(~(sw > 0))[0])
        raise NeighborhoodError(f"no positive weight near x={x[i]:.6g}")
    wn = w / sw[:, None]
    xbar = wn @ x
    dx = x[None, :] - xbar[:, None]
    ssx = np.sum(wn * dx * dx, axis=1)
    if np.any(~(ssx > 0)):
        i = int(np.flatnonzero(~(ssx > 0))[0])
        raise NeighborhoodError(f"local design is degenerate near x={x[i]:.6g}")
    rows = wn + ((x - xbar) / ssx)[:, None] * wn * dx
    slopes = wn * dx / ssx[:, None]
    return rows, slopes


def robust_fit(data: Dataset, config: RobustConfig) -> RobustFit:
    """Huber-reweighted local-linear fit evaluated at the training x.

    Observations are processed in ascending x order (ties keep input
    order) and every per-observation array follows that order. The curve
    is the fit of the last pass on the distinct x values; ``robust_weights`` are
    the weights computed from its residuals. A degenerate residual scale
    ends the iteration early with ``degenerate_scale`` set.
    """
    order = np.argsort(data.x1(), kind="stable")
    x, y = data.x1()[order], data.y[order]
    n = data.n
    u = (x[None, :] - x[:, None]) / config.bandwidth
    kw = config.kernel(u)
    kw = kw / kw.sum(axis=1, keepdims=True)
    # scale below this is roundoff on an exact fit
    floor = 1e-10 * max(float(np.ptp(y)), np.finfo(float).tiny)

    delta = np.ones(n)
    degenerate = False
    iterations = 0
    rs = np.zeros(n)
    s = 0.0
    for _ in range(config.max_iter):
        used = delta
        rows, slopes = _local_linear_rows(x, kw, used)
        yhat = rows @ y
        iterations += 1
        r = y - yhat
        try:
            s = robust_scale(r, config.scale, floor)
        except DegenerateScaleError:
            degenerate = True
            rs = np.zeros(n)
            break
        rs = r / s
        delta = huber_weight(rs, config.c)
        if np.max(np.abs(delta - used)) < DELTA_TOL:
            break

    trace = float(np.trace(rows))
    sigma2, df_err, se = smoother_bands(y, yhat, trace, rows, weights=used)
    first = np.r_[True, np.diff(x) > 0]
    curve = FitCurve.from_se(x[first], yhat[first], se[first], (slopes @ y)[first], TVALUE)
    return RobustFit(curve, yhat, np.asarray(delta), rs, s, iterations, degenerate, x, y, sigma2, df_err, trace)
