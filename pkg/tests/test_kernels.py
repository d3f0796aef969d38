import math

import numpy as np
import pytest
from scipy import integrate
from hypothesis import given
from hypothesis import strategies as st

from smoothkit.errors import DomainError
from smoothkit.kernels import KERNEL_NAMES, KernelSpec, kernel_eval, scaled_weights

finite = st.floats(-50, 50, allow_nan=False)


def test_epanechnikov_at_zero():
    assert kernel_eval("epanechnikov", 0.0) == 0.75


def test_tricube_at_boundary():
    assert kernel_eval("tricube", 1.0) == 0.0
    assert kernel_eval("tricube", -1.0) == 0.0


def test_gaussian_at_zero():
    assert kernel_eval("gaussian", 0.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), abs=1e-15)
    assert kernel_eval("gaussian", 0.0) == pytest.approx(0.3989422804014327, abs=1e-15)


def test_minvar_standard_form():
    assert kernel_eval("minvar", 0.0) == pytest.approx(9.0 / 8.0)
    assert kernel_eval("minvar", 0.5) == pytest.approx(0.375 * (3 - 1.25))


def test_unknown_kernel():
    with pytest.raises(DomainError):
        KernelSpec("cosine")


@pytest.mark.parametrize("name", KERNEL_NAMES)
def test_symmetry_on_random_points(name):
    d = np.random.default_rng(0).uniform(-3, 3, 1000)
    np.testing.assert_array_equal(kernel_eval(name, d), kernel_eval(name, -d))


@pytest.mark.parametrize("name", KERNEL_NAMES)
@given(d=finite)
def test_peak_at_zero(name, d):
    assert kernel_eval(name, d) <= kernel_eval(name, 0.0)


@pytest.mark.parametrize("name", ["epanechnikov", "gaussian", "tricube"])
@given(d=finite)
def test_nonnegative(name, d):
    assert kernel_eval(name, d) >= 0.0


def test_minvar_is_fourth_order():
    # second moment vanishes, so the kernel must dip below zero near |d|=1
    mass = integrate.quad(lambda d: kernel_eval("minvar", d), -1, 1)[0]
    second = integrate.quad(lambda d: d * d * kernel_eval("minvar", d), -1, 1)[0]
    assert mass == pytest.approx(1.0, abs=1e-10)
    assert second == pytest.approx(0.0, abs=1e-10)
    assert kernel_eval("minvar", 0.9) < 0.0


@pytest.mark.parametrize("name", ["epanechnikov", "minvar", "tricube"])
@given(d=st.floats(1.0, 1e6))
def test_compact_vanishes_outside(name, d):
    assert kernel_eval(name, d) == 0.0
    assert kernel_eval(name, -d) == 0.0


@given(d=st.floats(-30, 30))
def test_gaussian_strictly_positive(d):
    assert kernel_eval("gaussian", d) > 0.0


def test_support_labels():
    assert KernelSpec("gaussian").support == "unbounded"
    assert KernelSpec("tricube").support == "compact on |d|<1"


def test_scaled_weights_gaussian_center_on_point():
    pts = np.array([0.3, 0.9, 1.7])
    w = scaled_weights("gaussian", 0.3, pts, 0.5)
    assert w[0] == pytest.approx(0.3989422804014327, abs=1e-15)
    assert w[1] == pytest.approx(math.exp(-0.5 * 1.2**2) / math.sqrt(2 * math.pi))


def test_scaled_weights_outside_support_all_zero():
    pts = np.array([-2.0, 1.0, 3.5])
    np.testing.assert_array_equal(scaled_weights("epanechnikov", 0.0, pts, 1.0), 0.0)


def test_scaled_weights_rejects_bad_bandwidth():
    with pytest.raises(DomainError):
        scaled_weights("gaussian", 0.0, [1.0], 0.0)


@pytest.mark.parametrize("name", ["epanechnikov", "tricube", "gaussian"])
def test_doubling_bandwidth_never_decreases_weights(name):
    # oracle scan: K is nonincreasing on [0, inf), so K(d/2) >= K(d)
    d = np.linspace(0, 5, 5001)
    k = np.array([kernel_eval(name, v) for v in d])
    assert np.all(np.diff(k) <= 0)
    rng = np.random.default_rng(1)
    pts = rng.uniform(-3, 3, 200)
    for h in (0.1, 0.5, 1.0, 2.0):
        assert np.all(scaled_weights(name, 0.2, pts, 2 * h) >= scaled_weights(name, 0.2, pts, h))
