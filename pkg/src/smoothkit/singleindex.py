"""Single-index models y = f(x'beta) + e by semiparametric least squares.

The index direction minimizes the leave-one-out residual sum of squares of
a local-linear (gaussian kernel) regression of y on x'beta, with the
bandwidth reset to the rule of thumb of the current index values. Because
that objective is invariant to rescaling beta, the search runs over unit
vectors: Nelder-Mead in a tangent chart of the sphere around each start.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import optimize

from .dataio import Dataset, FitCurve
from .errors import DomainError, ExtrapolationError, OptimizationError, RankError, SmoothkitError
from .kernelreg import KernelRegSpec, localpoly_fit, rot_from_values
from .numerics import RCOND_MIN


@dataclass(frozen=True)
class SimOptions:
    restarts: int = 20
    seed: int = 0
    maxiter: int = 500
    xatol: float = 1e-6


@dataclass(frozen=True, eq=False)
class IndexFit:
    beta: NDArray[np.float64]
    link: FitCurve
    index_values: NDArray[np.float64]
    fitted: NDArray[np.float64]
    r_squared: float
    h_link: float
    objective: float
    names: tuple[str, ...] = ()

    @property
    def beta_first_one(self) -> NDArray[np.float64] | None:
        """beta rescaled so its first coefficient is 1 (None when that is ~0)."""
        if abs(self.beta[0]) <= 1e-6:
            return None
        return self.beta / self.beta[0]


def normalize_direction(b) -> NDArray[np.float64]:
    """Unit vector with its first nonzero coordinate positive."""
    b = np.asarray(b, dtype=float)
    norm = np.linalg.norm(b)
    if not norm > 0 or not np.isfinite(norm):
        raise DomainError("index direction must be a nonzero finite vector")
    b = b / norm
    nz = np.flatnonzero(b != 0)
    return -b if b[nz[0]] < 0 else b


def loo_local_linear(v, y, h: float) -> NDArray[np.float64]:
    """Leave-one-out gaussian local-linear predictions at each v_i."""
    d = v[None, :] - v[:, None]
    w = np.exp(-0.5 * (d / h) ** 2)
    np.fill_diagonal(w, 0.0)
    s0 = w.sum(axis=1)
    wd = w * d
    s1 = wd.sum(axis=1)
    s2 = (wd * d).sum(axis=1)
    t0 = w @ y
    t1 = wd @ y
    den = s0 * s2 - s1 * s1
    with np.errstate(divide="ignore", invalid="ignore"):
        return (s2 * t0 - s1 * t1) / den


def sim_objective(beta, X, y) -> float:
    """Leave-one-out residual sum of squares S(beta); ``inf`` when ill-posed."""
    v = X @ beta
    try:
        h = rot_from_values(v)
    except SmoothkitError:
        return np.inf
    pred = loo_local_linear(v, y, h)
    s = float(np.sum((y - pred) ** 2))
    return s if np.isfinite(s) else np.inf


def _check_design(X, names):
    Xc = X - X.mean(axis=0)
    sd = np.sqrt(np.sum(Xc**2, axis=0))
    if np.any(sd == 0):
        bad = [names[j] for j in np.flatnonzero(sd == 0)]
        raise RankError(f"constant covariate(s) {bad} make the index unidentified")
    sv = np.linalg.svd(Xc / sd, compute_uv=False)
    if sv[-1] / sv[0] < np.sqrt(RCOND_MIN):
        raise RankError(f"the {X.shape[1]} covariates are collinear to working precision")


def _search(b0, X, y, opts: SimOptions):
    k = b0.size
    # columns 1..k-1 of a full QR of b0 span its orthogonal complement
    Q = np.linalg.qr(np.c_[b0, np.eye(k)])[0][:, 1:k]

    def to_beta(t):
        return normalize_direction(b0 + Q @ t)

    def obj(t):
        return sim_objective(to_beta(t), X, y)

    simplex = np.vstack([np.zeros(k - 1), 0.25 * np.eye(k - 1)])
    res = optimize.minimize(
        obj,
        np.zeros(k - 1),
        method="Nelder-Mead",
        options={"initial_simplex": simplex, "xatol": opts.xatol, "fatol": np.inf, "maxiter": opts.maxiter},
    )
    return to_beta(res.x), float(res.fun)


def _starts(X, y, init, opts: SimOptions):
    starts = []
    if init is not None:
        starts.append(normalize_direction(init))
    Xc = X - X.mean(axis=0)
    ols = np.linalg.lstsq(Xc, y - y.mean(), rcond=None)[0]
    if np.linalg.norm(ols) > 0:
        starts.append(normalize_direction(ols))
    rng = np.random.default_rng(opts.seed)
    for _ in range(opts.restarts):
        starts.append(normalize_direction(rng.standard_normal(X.shape[1])))
    return starts


def _link(v, y):
    data = Dataset.from_xy(v, y, "index")
    grid = np.unique(v)
    curve, smoother = localpoly_fit(data, KernelRegSpec("gaussian", 1, "auto-cv"), grid)
    return curve, smoother.h


def sim_fit(data: Dataset, init=None, opts: SimOptions | None = None) -> IndexFit:
    """Estimate the index direction and the link function.

    Starts are ``init`` (if given), the OLS direction and ``opts.restarts``
    seeded random directions; the best local minimum wins, ties going to
    the lexicographically smallest beta. The link is then refitted with a
    cross-validated bandwidth on the distinct index values.
    """
    opts = opts or SimOptions()
    X, y = data.X, data.y
    _check_design(X, data.names)
    if data.k == 1:
        beta, best = np.ones(1), None
    else:
        results = [_search(b0, X, y, opts) for b0 in _starts(X, y, init, opts)]
        finite = [(s, tuple(b)) for b, s in results if np.isfinite(s)]
        if not finite:
            raise OptimizationError("objective was non-finite from every start")
        best, beta = min(finite)
        beta = np.array(beta)
    v = X @ beta
    curve, h = _link(v, y)
    fitted = curve.interpolate(v)
    r2 = float(np.corrcoef(fitted, y)[0, 1] ** 2) if np.ptp(fitted) > 0 and np.ptp(y) > 0 else 0.0
    if best is None:
        best = sim_objective(beta, X, y)
    return IndexFit(beta, curve, v, fitted, r2, h, best, data.names)


def sim_predict(fit: IndexFit, xnew) -> float:
    """Link curve interpolated linearly at ``xnew @ beta``."""
    v = float(np.asarray(xnew, dtype=float) @ fit.beta)
    lo, hi = fit.link.grid[0], fit.link.grid[-1]
    if not lo <= v <= hi:
        raise ExtrapolationError(f"index value {v:.6g} outside fitted range [{lo:.6g}, {hi:.6g}]")
    return float(fit.link.interpolate(v))
