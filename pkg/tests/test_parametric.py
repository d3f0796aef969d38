import numpy as np
import pytest

from smoothkit.dataio import Dataset
from smoothkit.errors import DomainError, RankError, SizeError, UsageError
from smoothkit.parametric import anova_nested, diagnostics, fit_poly


def _data(x, y):
    return Dataset.from_xy(np.asarray(x, float), np.asarray(y, float))


def test_exact_line():
    x = np.linspace(-3, 5, 12)
    fit = fit_poly(_data(x, 3 + 2 * x), 1)
    np.testing.assert_allclose(fit.coeffs, [3, 2], atol=1e-12)
    assert fit.r_squared == pytest.approx(1.0)


def test_constant_response():
    fit = fit_poly(_data(np.arange(6.0), np.full(6, 4.2)), 1)
    assert fit.r_squared == 0.0
    assert fit.p_value == 1.0
    assert fit.coeffs[1] == pytest.approx(0.0, abs=1e-12)


def test_quadratic_exact_recovery():
    x = np.linspace(-2, 3, 50)
    fit = fit_poly(_data(x, 1 + x - x**2), 2)
    np.testing.assert_allclose(fit.coeffs, [1, 1, -1], atol=1e-8)


def test_raw_scale_coefficients_far_from_origin():
    x = np.linspace(100, 110, 40)
    y = 0.5 - 0.02 * x + 0.001 * x**2
    fit = fit_poly(_data(x, y), 2)
    np.testing.assert_allclose(fit.predict(x), y, rtol=1e-9)


def test_errors():
    with pytest.raises(SizeError):
        fit_poly(_data([0, 1, 2], [1, 2, 3]), 2)
    with pytest.raises(RankError):
        fit_poly(_data(np.ones(5), np.arange(5.0)), 1)
    with pytest.raises(DomainError):
        fit_poly(_data(np.arange(20.0), np.arange(20.0)), 9)


def test_invariants_on_random_data():
    rng = np.random.default_rng(11)
    x = rng.uniform(-1, 2, 60)
    y = np.exp(x) + rng.normal(0, 0.3, 60)
    fits = [fit_poly(_data(x, y), d) for d in range(1, 5)]
    rss = [f.rss for f in fits]
    assert all(b <= a + 1e-12 for a, b in zip(rss, rss[1:]))
    for f in fits:
        assert 0 <= f.r_squared <= 1 and 0 <= f.p_value <= 1
        assert len(f.coeffs) == f.degree + 1
        assert abs(f.residuals.sum()) <= 1e-8 * f.n * np.abs(y).max()
        assert f.r_squared == pytest.approx(np.corrcoef(f.fitted, y)[0, 1] ** 2, abs=1e-10)


@pytest.mark.parametrize("c", [-3.0, 0.01, 250.0])
def test_scale_equivariance(c):
    rng = np.random.default_rng(12)
    x = rng.uniform(0, 1, 40)
    y = np.sin(3 * x) + rng.normal(0, 0.2, 40)
    a = fit_poly(_data(x, y), 3)
    b = fit_poly(_data(x, c * y), 3)
    np.testing.assert_allclose(b.coeffs, c * a.coeffs, rtol=1e-9, atol=1e-12 * abs(c))
    for attr in ("r_squared", "f_stat", "p_value"):
        assert getattr(b, attr) == pytest.approx(getattr(a, attr), rel=1e-9)


def test_anova_exact_big_model():
    x = np.linspace(-1, 1, 30)
    d = _data(x, x**4 - x)
    f, p = anova_nested(fit_poly(d, 1), fit_poly(d, 4), 30)
    assert p == 0.0 and f > 1e20


def test_anova_no_improvement():
    x = np.linspace(-1, 1, 30)
    d = _data(x, 2 * x + 1)
    small, big = fit_poly(d, 1), fit_poly(d, 2)
    object.__setattr__(big, "rss", small.rss)
    assert anova_nested(small, big, 30) == (0.0, 1.0)


def test_anova_mismatched_n():
    x = np.linspace(0, 1, 20)
    small = fit_poly(_data(x, x**2), 1)
    big = fit_poly(_data(x[:15], x[:15] ** 2), 3)
    with pytest.raises(UsageError):
        anova_nested(small, big, 20)


@pytest.mark.slow
def test_anova_power_monte_carlo():
    hits = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        x = rng.uniform(-2, 2, 200)
        y = x**4 - 2 * x**2 + rng.normal(0, 1.0, 200)
        d = _data(x, y)
        _, p = anova_nested(fit_poly(d, 1), fit_poly(d, 4), 200)
        hits += p < 0.01
    assert hits >= 95


def test_diagnostics_perfect_fit():
    x = np.linspace(0, 1, 10)
    diag = diagnostics(fit_poly(_data(x, 1 - x), 1))
    np.testing.assert_allclose(diag.resid, 0.0, atol=1e-14)


def test_diagnostics_qq_positions_n3():
    diag = diagnostics(fit_poly(_data([0.0, 1.0, 2.0], [0.0, 2.0, 1.0]), 1))
    from scipy.stats import norm

    np.testing.assert_allclose(diag.qq_theoretical, norm.ppf([1 / 6, 3 / 6, 5 / 6]), atol=1e-12)


def test_diagnostics_standardized_moments():
    rng = np.random.default_rng(13)
    x = rng.uniform(0, 10, 500)
    y = 1 + 0.5 * x + rng.normal(0, 2.0, 500)
    diag = diagnostics(fit_poly(_data(x, y), 1))
    assert abs(diag.std_resid.mean()) < 0.2
    assert abs(diag.std_resid.var() - 1.0) < 0.2
    np.testing.assert_array_equal(diag.qq_sample, np.sort(diag.std_resid))
