"""Regression smoothers: parametric, kernel, spline, semiparametric and robust."""

__version__ = "0.1.0"
