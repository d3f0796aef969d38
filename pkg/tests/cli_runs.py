"""Drive every CLI command into a directory and collect the written bytes."""

from pathlib import Path

import numpy as np

from smoothkit.cli import run
from smoothkit.dataio import write_csv


def _multi_csv(path: Path) -> None:
    rng = np.random.default_rng(5)
    n = 120
    educ = rng.uniform(8, 18, n)
    income = rng.uniform(0, 1, n)
    female = rng.integers(0, 2, n).astype(float)
    wage = 1 + 0.1 * educ + np.sin(2 * np.pi * income) - 0.3 * female + rng.normal(0, 0.2, n)
    write_csv(path, {"wage": wage, "educ": educ, "income": income, "female": female})


def command_lines(work: Path) -> list[list[str]]:
    sim = str(work / "sim.csv")
    multi = str(work / "multi.csv")
    out = ["--outdir", str(work / "out")]
    return [
        ["simulate", "--out", sim, "--seed", "3", "--outlier", "0.8:0.6", "--outlier", "0.75:0.62"],
        ["fit-poly", sim, "--degree", "3", "--anova-against", "1", *out],
        ["diagnose", sim, "--degree", "2", *out],
        ["fit-kernel", sim, "--bandwidth", "cv", "--degree", "1", *out],
        ["fit-kernel", sim, "--bandwidth", "0.05", "--kernel", "epanechnikov", "--prefix", "epa", *out],
        ["fit-spline", sim, "--lambda", "gcv", *out],
        ["fit-robust", sim, "--bandwidth", "0.046", "--plot", *out],
        ["fit-additive", multi, "--response", "wage", "--factor", "female",
         "--terms", "educ:linear,female:linear,income:smooth", *out],
        ["fit-sim", multi, "--response", "wage", "--covariates", "educ,income", "--restarts", "3", *out],
        ["compare-robust", "--seeds", "5", *out],
    ]


def run_all(work: Path) -> dict[str, bytes]:
    """Run every command in ``work``; returns {relative path: bytes}."""
    work.mkdir(parents=True, exist_ok=True)
    _multi_csv(work / "multi.csv")
    for argv in command_lines(work):
        code = run(argv)
        if code != 0:
            raise AssertionError(f"exit {code} for {argv}")
    return {str(p.relative_to(work)): p.read_bytes() for p in sorted(work.rglob("*")) if p.is_file()}
