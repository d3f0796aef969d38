"""Datasets, fitted curves and the file formats shared by every module.

Input data is a plain comma-separated file with a header line. Fitted
curves are written as tab-separated columns and fit summaries as a single
JSON document.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from .errors import ColumnError, DataError, ParseError, SizeError, UsageError

SCHEMA_VERSION = 1

CURVE_COLUMNS = ("grid", "fit", "se", "lower", "upper", "deriv")


def _frozen(a, ndim: int) -> NDArray[np.float64]:
    arr = np.array(a, dtype=float, copy=True)
    if arr.ndim != ndim:
        raise DataError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable response vector plus covariate matrix.

    ``X`` has one column per covariate; ``factor_mask[j]`` marks columns
    holding 0/1-encoded categorical values.
    """

    y: NDArray[np.float64]
    X: NDArray[np.float64]
    names: tuple[str, ...]
    factor_mask: tuple[bool, ...] = ()

    def __post_init__(self):
        y = _frozen(self.y, 1)
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        X = _frozen(X, 2)
        names = tuple(self.names)
        mask = tuple(bool(m) for m in self.factor_mask) or (False,) * X.shape[1]
        n = y.shape[0]
        if n < 2:
            raise SizeError(f"need at least 2 observations, got {n}")
        if X.shape[0] != n:
            raise DataError(f"X has {X.shape[0]} rows but y has length {n}")
        if len(names) != X.shape[1] or len(mask) != X.shape[1]:
            raise DataError("names and factor_mask must have one entry per column of X")
        if not np.all(np.isfinite(y)):
            raise DataError("response contains NaN or Inf")
        for j, name in enumerate(names):
            col = X[:, j]
            if not np.all(np.isfinite(col)):
                raise DataError(f"column {name!r} contains NaN or Inf")
            if mask[j] and not np.all((col == 0.0) | (col == 1.0)):
                raise DataError(f"factor column {name!r} must contain only 0 and 1")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "factor_mask", mask)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def k(self) -> int:
        return self.X.shape[1]

    def column(self, name: str) -> NDArray[np.float64]:
        try:
            return self.X[:, self.names.index(name)]
        except ValueError:
            raise ColumnError(f"no covariate named {name!r}; have {list(self.names)}") from None

    def select(self, names: Sequence[str]) -> "Dataset":
        """Dataset restricted to the named covariates, in the given order."""
        idx = []
        for name in names:
            if name not in self.names:
                raise ColumnError(f"no covariate named {name!r}; have {list(self.names)}")
            idx.append(self.names.index(name))
        return Dataset(
            self.y,
            self.X[:, idx],
            tuple(self.names[i] for i in idx),
            tuple(self.factor_mask[i] for i in idx),
        )

    def x1(self) -> NDArray[np.float64]:
        """The covariate of a single-covariate dataset."""
        if self.k != 1:
            raise UsageError(f"this fit needs exactly one covariate, dataset has {self.k}")
        return self.X[:, 0]

    @classmethod
    def from_xy(cls, x, y, name: str = "x") -> "Dataset":
        return cls(np.asarray(y, dtype=float), np.asarray(x, dtype=float)[:, None], (name,))


@dataclass(frozen=True, eq=False)
class FitCurve:
    """Estimated curve on an ascending grid with pointwise 95% band."""

    grid: NDArray[np.float64]
    fit: NDArray[np.float64]
    se: NDArray[np.float64]
    lower: NDArray[np.float64]
    upper: NDArray[np.float64]
    deriv: NDArray[np.float64] | None = None

    def __post_init__(self):
        arrays = {name: _frozen(getattr(self, name), 1) for name in CURVE_COLUMNS[:5]}
        if self.deriv is not None:
            arrays["deriv"] = _frozen(self.deriv, 1)
        m = arrays["grid"].shape[0]
        if any(a.shape[0] != m for a in arrays.values()):
            raise DataError("all FitCurve arrays must have equal length")
        if m > 1 and not np.all(np.diff(arrays["grid"]) > 0):
            raise DataError("FitCurve grid must be strictly ascending")
        if np.any(arrays["lower"] > arrays["fit"]) or np.any(arrays["fit"] > arrays["upper"]):
            raise DataError("FitCurve band must satisfy lower <= fit <= upper")
        for name, a in arrays.items():
            object.__setattr__(self, name, a)

    @classmethod
    def from_se(cls, grid, fit, se, deriv=None, tvalue: float = 2.0) -> "FitCurve":
        fit = np.asarray(fit, dtype=float)
        se = np.asarray(se, dtype=float)
        return cls(grid, fit, se, fit - tvalue * se, fit + tvalue * se, deriv)

    def __len__(self) -> int:
        return self.grid.shape[0]

    def interpolate(self, x) -> NDArray[np.float64]:
        """Linear interpolation of ``fit``; callers check the range."""
        return np.interp(x, self.grid, self.fit)


def _fmt(v: float) -> str:
    # repr is the shortest string that round-trips a double exactly
    return repr(float(v))


def load_csv(path, response: str, factors: Sequence[str] = ()) -> Dataset:
    """Read a comma-separated file into a Dataset.

    Every column other than ``response`` becomes a covariate, in file order.
    Columns listed in ``factors`` must already be 0/1 encoded.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path}: empty file, expected a header line")
    header = [h.strip() for h in rows[0]]
    body = [r for r in rows[1:] if any(cell.strip() for cell in r)]
    for col in [response, *factors]:
        if col not in header:
            raise ColumnError(f"{path}: column {col!r} not found; header is {header}")
    if len(body) < 2:
        raise SizeError(f"{path}: need at least 2 data rows, found {len(body)}")

    values = np.empty((len(body), len(header)))
    for i, row in enumerate(body, start=1):
        if len(row) != len(header):
            raise ParseError(
                f"{path}: row {i} has {len(row)} fields, header has {len(header)}", row=i
            )
        for j, cell in enumerate(row):
            try:
                values[i - 1, j] = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: non-numeric value {cell.strip()!r} at row {i}, column {header[j]}",
                    row=i,
                    column=header[j],
                ) from None

    ri = header.index(response)
    cov = [j for j in range(len(header)) if j != ri]
    names = tuple(header[j] for j in cov)
    mask = tuple(header[j] in factors for j in cov)
    return Dataset(values[:, ri], values[:, cov], names, mask)


def write_csv(path, columns: dict[str, Sequence[float]]) -> None:
    """Write equal-length numeric columns as a comma-separated file."""
    _write_delimited(path, columns, ",")


def write_table(path, columns: dict[str, Sequence[float]]) -> None:
    """Write equal-length numeric columns as a tab-separated file."""
    _write_delimited(path, columns, "\t")


def _write_delimited(path, columns, sep):
    names = list(columns)
    cols = [np.asarray(columns[k], dtype=float) for k in names]
    lengths = {c.shape[0] for c in cols}
    if len(lengths) > 1:
        raise DataError(f"columns have unequal lengths {sorted(lengths)}")
    lines = [sep.join(names)]
    lines.extend(sep.join(_fmt(v) for v in row) for row in zip(*cols))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def emit_curve(curve: FitCurve, path) -> None:
    """Write a FitCurve as TSV; the deriv column is omitted when absent."""
    cols = {name: getattr(curve, name) for name in CURVE_COLUMNS[:5]}
    if curve.deriv is not None:
        cols["deriv"] = curve.deriv
    write_table(path, cols)


def read_table(path, sep: str = "\t") -> dict[str, NDArray[np.float64]]:
    """Inverse of :func:`write_table`."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    names = lines[0].split(sep)
    data = np.array([[float(v) for v in line.split(sep)] for line in lines[1:]]).reshape(-1, len(names))
    return {name: data[:, j] for j, name in enumerate(names)}


def read_curve(path) -> FitCurve:
    t = read_table(path)
    return FitCurve(t["grid"], t["fit"], t["se"], t["lower"], t["upper"], t.get("deriv"))


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer, int)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


@dataclass
class FitSummary:
    """Common JSON summary emitted by every fit."""

    method: str
    n: int
    smoothing_parameter: float | None = None
    coefficients: dict[str, float] = field(default_factory=dict)
    r_squared: float | None = None
    effective_df: float | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "schema": SCHEMA_VERSION,
            "method": self.method,
            "smoothing_parameter": self.smoothing_parameter,
            "coefficients": dict(self.coefficients),
            "r_squared": self.r_squared,
            "effective_df": self.effective_df,
            "n": self.n,
        }
        d.update(self.extra)
        return _jsonable(d)

    def write(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n", encoding="utf-8")
