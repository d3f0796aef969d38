"""Symmetric kernel weight functions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _epanechnikov(d):
    return np.where(np.abs(d) < 1.0, 0.75 * (1.0 - d * d), 0.0)


def _minvar(d):
    return np.where(np.abs(d) < 1.0, 0.375 * (3.0 - 5.0 * d * d), 0.0)


def _gaussian(d):
    return _INV_SQRT_2PI * np.exp(-0.5 * d * d)


def _tricube(d):
    a = np.abs(d)
    return np.where(a < 1.0, (1.0 - a**3) ** 3, 0.0)


_KERNELS = {
    "epanechnikov": (_epanechnikov, True),
    "minvar": (_minvar, True),
    "gaussian": (_gaussian, False),
    "tricube": (_tricube, True),
}

KERNEL_NAMES = tuple(_KERNELS)


@dataclass(frozen=True)
class KernelSpec:
    """A named kernel; compact kernels vanish for ``|d| >= 1``."""

    name: str = "gaussian"

    def __post_init__(self):
        if self.name not in _KERNELS:
            raise DomainError(f"unknown kernel {self.name!r}; choose one of {KERNEL_NAMES}")

    @property
    def compact(self) -> bool:
        return _KERNELS[self.name][1]

    @property
    def support(self) -> str:
        return "compact on |d|<1" if self.compact else "unbounded"

    def __call__(self, d):
        return kernel_eval(self, d)


def get_kernel(kernel: "KernelSpec | str") -> KernelSpec:
    return kernel if isinstance(kernel, KernelSpec) else KernelSpec(kernel)


def kernel_eval(spec: KernelSpec | str, d):
    """Evaluate the kernel at scaled distance(s) ``d``.

    Returns a float for scalar input and an array otherwise.
    """
    func = _KERNELS[get_kernel(spec).name][0]
    out = func(np.asarray(d, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def scaled_weights(spec: KernelSpec | str, center: float, points, h: float) -> np.ndarray:
    """Unnormalized weights ``K((center - x_i) / h)``."""
    if not h > 0:
        raise DomainError(f"bandwidth must be positive, got {h}")
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        raise DomainError("points must be nonempty")
    return np.asarray(kernel_eval(spec, (center - points) / h), dtype=float)
