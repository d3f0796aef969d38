"""Seeded synthetic data, including the logistic-curve outlier experiment.

Random numbers come from SplitMix64 (Steele, Lea & Flood 2014) so that a
seed produces the same dataset on any platform or language:

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)                      (all arithmetic mod 2^64)

A uniform on [0, 1) is ``(next() >> 11) * 2^-53``. Normals use the
Box-Muller transform on pairs (u1, u2), ``sqrt(-2 ln(1 - u1)) * cos(2 pi u2)``
first and the matching ``sin`` value second. Draw order: n uniforms for x,
then the noise normals in ascending-x order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from .dataio import Dataset
from .errors import DomainError

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK
        self._spare = None

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def normal(self) -> float:
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1, u2 = self.uniform(), self.uniform()
        radius = math.sqrt(-2.0 * math.log(1.0 - u1))
        angle = 2.0 * math.pi * u2
        self._spare = radius * math.sin(angle)
        return radius * math.cos(angle)

    def uniforms(self, n: int) -> NDArray[np.float64]:
        return np.array([self.uniform() for _ in range(n)])

    def normals(self, n: int) -> NDArray[np.float64]:
        return np.array([self.normal() for _ in range(n)])


def logistic20(x):
    return 1.0 / (1.0 + np.exp(-20.0 * (np.asarray(x, dtype=float) - 0.5)))


def _linear(x):
    return 1.0 + 2.0 * np.asarray(x, dtype=float)


def _sine(x):
    return np.sin(2.0 * np.pi * np.asarray(x, dtype=float))


TRUTHS = {"logistic20": logistic20, "linear": _linear, "sine": _sine}


@dataclass(frozen=True)
class SimRecipe:
    """Recipe for one synthetic dataset.

    ``truth`` is a name from ``TRUTHS`` or a tuple of polynomial
    coefficients (constant term first).
    """

    n: int = 100
    truth: str | tuple[float, ...] = "logistic20"
    noise_sd: float = 0.05
    outliers: tuple[tuple[float, float], ...] = ()
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"n must be at least 2, got {self.n}")
        if not self.noise_sd >= 0:
            raise DomainError(f"noise_sd must be nonnegative, got {self.noise_sd}")
        if isinstance(self.truth, str):
            if self.truth not in TRUTHS:
                raise DomainError(f"unknown truth {self.truth!r}; choose one of {sorted(TRUTHS)} or coefficients")
        else:
            object.__setattr__(self, "truth", tuple(float(c) for c in self.truth))
        object.__setattr__(self, "outliers", tuple((float(a), float(b)) for a, b in self.outliers))

    def mean_function(self, x) -> NDArray[np.float64]:
        if isinstance(self.truth, str):
            return TRUTHS[self.truth](x)
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), self.truth)


REFERENCE_OUTLIERS = ((0.8, 0.6), (0.75, 0.62))
REFERENCE_RECIPE = SimRecipe(n=100, truth="logistic20", noise_sd=0.05, outliers=REFERENCE_OUTLIERS, seed=0)


def generate(recipe: SimRecipe) -> tuple[Dataset, NDArray[np.float64]]:
    """Draw a dataset; returns it with the true mean at its x values."""
    rng = SplitMix64(recipe.seed)
    x = np.sort(rng.uniforms(recipe.n))
    y = recipe.mean_function(x) + recipe.noise_sd * rng.normals(recipe.n)
    if recipe.outliers:
        ox, oy = np.array(recipe.outliers).T
        x = np.r_[x, ox]
        y = np.r_[y, oy]
        order = np.argsort(x, kind="stable")
        x, y = x[order], y[order]
    return Dataset.from_xy(x, y), recipe.mean_function(x)


def rmse_against_truth(fit_values, truth, x=None, mask: Sequence[float] | None = None) -> float:
    """Root-mean-square error, optionally over ``mask[0] <= x <= mask[1]``."""
    fit_values = np.asarray(fit_values, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if fit_values.shape != truth.shape:
        raise DomainError(f"length mismatch: {fit_values.shape} vs {truth.shape}")
    keep = np.ones(fit_values.shape, dtype=bool)
    if mask is not None:
        if x is None:
            raise DomainError("an x vector is required to apply an interval mask")
        x = np.asarray(x, dtype=float)
        keep = (x >= mask[0]) & (x <= mask[1])
    if not np.any(keep):
        raise DomainError(f"mask {mask} selects no points")
    diff = fit_values[keep] - truth[keep]
    return float(np.sqrt(np.mean(diff * diff)))
