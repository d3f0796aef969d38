"""Replicated comparison of kernel, spline and robust fits on contaminated data."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .kernelreg import LinearSmoother
from .kernels import KernelSpec
from .robust import RobustConfig, robust_fit
from .simulate import REFERENCE_RECIPE, SimRecipe, generate, rmse_against_truth
from .splinereg import SplineSpec, spline_fit

REFERENCE_BANDWIDTH = 0.046
OUTLIER_WINDOW = (0.65, 0.9)


@dataclass(frozen=True)
class SeedResult:
    seed: int
    rmse_kernel: float
    rmse_spline: float
    rmse_robust: float


def thread_count() -> int:
    """Worker cap from SMOOTHKIT_THREADS (0 or unset means one per CPU)."""
    raw = os.environ.get("SMOOTHKIT_THREADS", "0").strip() or "0"
    n = int(raw)
    return max(1, os.cpu_count() or 1) if n <= 0 else n


def fits_for_seed(recipe: SimRecipe, bandwidth: float):
    """Dataset, truth and the three competing fits at the training x."""
    data, truth = generate(recipe)
    x, y = data.x1(), data.y
    kernel = LinearSmoother(x, KernelSpec("gaussian"), bandwidth, 1).weights(x) @ y
    spline = spline_fit(data, SplineSpec())[1].fitted
    robust = robust_fit(data, RobustConfig(bandwidth)).fitted
    return data, truth, {"kernel": kernel, "spline": spline, "robust": robust}


def run_seed(recipe: SimRecipe, bandwidth: float, window) -> SeedResult:
    data, truth, fits = fits_for_seed(recipe, bandwidth)
    x = data.x1()
    r = {name: rmse_against_truth(v, truth, x, window) for name, v in fits.items()}
    return SeedResult(recipe.seed, r["kernel"], r["spline"], r["robust"])


def compare_robust(
    seeds, recipe: SimRecipe = REFERENCE_RECIPE, bandwidth: float = REFERENCE_BANDWIDTH, window=OUTLIER_WINDOW
) -> list[SeedResult]:
    """RMSE to the true curve over ``window`` for each seed, sorted by seed."""
    recipes = [replace(recipe, seed=int(s)) for s in seeds]
    workers = min(thread_count(), len(recipes)) or 1
    if workers == 1:
        results = [run_seed(r, bandwidth, window) for r in recipes]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda r: run_seed(r, bandwidth, window), recipes))
    return sorted(results, key=lambda r: r.seed)


def summarize(results: list[SeedResult]) -> dict:
    k = np.array([r.rmse_kernel for r in results])
    s = np.array([r.rmse_spline for r in results])
    rb = np.array([r.rmse_robust for r in results])
    return {
        "seeds": len(results),
        "robust_beats_kernel": int(np.sum(rb < k)),
        "robust_beats_spline": int(np.sum(rb < s)),
        "median_kernel_minus_robust": float(np.median(k - rb)),
        "median_spline_minus_robust": float(np.median(s - rb)),
        "median_rmse": {"kernel": float(np.median(k)), "spline": float(np.median(s)), "robust": float(np.median(rb))},
    }
