"""Independent reference computations used as test oracles.

Nothing here imports smoothkit's numerical code paths: each oracle is a
direct, slow transcription of the defining formula.
"""

import math

import numpy as np


def gaussian(d):
    return math.exp(-0.5 * d * d) / math.sqrt(2.0 * math.pi)


def epanechnikov(d):
    return 0.75 * (1.0 - d * d) if abs(d) < 1.0 else 0.0


KERNELS = {"gaussian": gaussian, "epanechnikov": epanechnikov}


def nw_point(x, y, q, h, kernel="gaussian"):
    k = KERNELS[kernel]
    num = den = 0.0
    for xi, yi in zip(x, y):
        w = k((q - xi) / h)
        num += w * yi
        den += w
    return num / den


def local_poly_point(x, y, q, h, degree, kernel="gaussian", skip=None):
    """Weighted LS on raw powers (x_i - q)^j via lstsq on sqrt-weighted rows."""
    k = KERNELS[kernel]
    rows, rhs = [], []
    for i, (xi, yi) in enumerate(zip(x, y)):
        if i == skip:
            continue
        sw = math.sqrt(k((xi - q) / h))
        rows.append([sw * (xi - q) ** j for j in range(degree + 1)])
        rhs.append(sw * yi)
    beta = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)[0]
    return beta


def naive_cv(x, y, h, degree, kernel="gaussian"):
    """Sum of squared residuals of delete-one refits."""
    total = 0.0
    for i in range(len(x)):
        xs = np.delete(x, i)
        ys = np.delete(y, i)
        pred = local_poly_point(xs, ys, x[i], h, degree, kernel)[0]
        total += (y[i] - pred) ** 2
    return total


def pattern_search(obj, start, step=1.0, tol=1e-11, max_iter=200000):
    """Compass search with step halving: brute-force minimizer."""
    x = np.array(start, dtype=float)
    fx = obj(x)
    dims = x.size
    it = 0
    while step > tol and it < max_iter:
        it += 1
        improved = False
        for j in range(dims):
            for sgn in (1.0, -1.0):
                cand = x.copy()
                cand[j] += sgn * step
                fc = obj(cand)
                if fc < fx:
                    x, fx, improved = cand, fc, True
                    break
        if not improved:
            step *= 0.5
    return x


def f_density(t, d1, d2):
    if t <= 0:
        return 0.0
    logc = (
        math.lgamma((d1 + d2) / 2)
        - math.lgamma(d1 / 2)
        - math.lgamma(d2 / 2)
        + (d1 / 2) * math.log(d1 / d2)
    )
    return math.exp(logc + (d1 / 2 - 1) * math.log(t) - ((d1 + d2) / 2) * math.log1p(d1 * t / d2))


def quantile_linear(sorted_values, p):
    """Order-statistic interpolation at position p*(m-1)."""
    m = len(sorted_values)
    pos = p * (m - 1)
    lo = int(math.floor(pos))
    hi = min(lo + 1, m - 1)
    frac = pos - lo
    return sorted_values[lo] + frac * (sorted_values[hi] - sorted_values[lo])


def truncated_power_design(x, knots, p):
    cols = [[xi**j for j in range(p + 1)] + [max(xi - t, 0.0) ** p for t in knots] for xi in x]
    return np.array(cols)


def ridge_spline(x, y, knots, p, lam):
    B = truncated_power_design(x, knots, p)
    D = np.diag([0.0] * (p + 1) + [1.0] * len(knots))
    A = B.T @ B + lam * D
    beta = np.linalg.solve(A, B.T @ y)
    S = B @ np.linalg.solve(A, B.T)
    return beta, B, S
