import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from deconvkde.kernels import (_FAN_TAYLOR, FAN_CROSSOVER, CustomKernel, FanKernel,
                               KernelSpec, SincKernel, edge_params, get_kernel)
from deconvkde.errors import ConfigurationError

W0 = 16 / (35 * math.pi)
PARSEVAL = 1024 / (3003 * math.pi)


def _w_oracle(x):
    # (1/2pi) int_{-1}^{1} cos(tx) (1 - t^2)^3 dt by adaptive quadrature
    return integrate.quad(lambda t: math.cos(t * x) * (1 - t * t) ** 3, 0, 1,
                          epsabs=1e-14, epsrel=1e-13, limit=200)[0] / math.pi


def test_phi_values(fan):
    assert fan.phi(0.0) == 1.0
    assert fan.phi(0.5) == pytest.approx(0.421875, abs=1e-15)
    assert fan.phi(1.2) == 0.0
    assert fan.phi(-1.2) == 0.0


@given(st.floats(-3, 3))
def test_phi_bounded_and_symmetric(t):
    for kern in (FanKernel(), SincKernel()):
        assert abs(kern.phi(t)) <= 1
        assert kern.phi(t) == kern.phi(-t)


def test_w_at_zero(fan):
    assert fan.w(0.0) == pytest.approx(W0, abs=1e-15)
    assert fan.w(0.0) == pytest.approx(_w_oracle(0.0), abs=1e-13)


@pytest.mark.parametrize("x", [0.1, 0.3, 0.49, 0.5, 0.8, 1.7, 3.0, 5.0, 12.5, 40.0])
def test_w_matches_quadrature(fan, x):
    assert fan.w(x) == pytest.approx(_w_oracle(x), abs=1e-10)


def test_w_symmetric(fan):
    x = np.linspace(0, 20, 401)
    np.testing.assert_array_equal(fan.w(x), fan.w(-x))
    assert fan.w(-3.0) == fan.w(3.0)


def test_branches_agree_at_crossover(fan):
    x = np.array([FAN_CROSSOVER])
    taylor = np.polynomial.polynomial.polyval(x * x, _FAN_TAYLOR)
    closed = FanKernel._closed_form(x)
    assert abs(taylor[0] - closed[0]) < 1e-10


def test_w_zero_from_phi_integral(fan):
    val = integrate.quad(fan.phi, -1, 1, epsabs=1e-15)[0] / (2 * math.pi)
    assert abs(val - fan.w(0.0)) < 1e-10


def test_w_integrates_to_one(fan):
    # step well below the oscillation period; the tail beyond 200 is O(1e-8)
    x = np.linspace(-200, 200, 800001)
    assert abs(np.trapezoid(fan.w(x), x) - 1.0) < 1e-4


def test_parseval(fan):
    x = np.linspace(-150, 150, 600001)
    assert abs(np.trapezoid(fan.w(x) ** 2, x) - PARSEVAL) < 1e-6
    assert fan.phi_sq_integral() / (2 * math.pi) == pytest.approx(PARSEVAL, rel=1e-14)
    # generic quadrature route versus the closed form
    assert KernelSpec.phi_sq_integral(fan) == pytest.approx(2 * 1024 / 3003, rel=1e-13)


def test_decay_bound(fan):
    x = np.linspace(0.01, 500, 200001)
    w = np.abs(fan.w(x))
    assert np.all(w <= np.minimum(W0, 0.5 / x) + 1e-15)


def test_edge_params(fan):
    assert edge_params(fan) == (8.0, 3.0)
    t = 1e-4
    ratio = fan.phi(1 - t) / t ** 3
    assert 7.99 <= ratio <= 8.0
    triangular = CustomKernel(name="triangular", A=1.0, alpha=1.0, phi_fn=lambda t: 1 - np.abs(t))
    assert edge_params(triangular) == (1.0, 1.0)
    assert edge_params(SincKernel()) == (1.0, 0.0)


def test_edge_params_rejects_wrong_constants():
    bad = CustomKernel(name="bad", A=3.0, alpha=3.0, phi_fn=lambda t: (1 - t * t) ** 3)
    with pytest.raises(ConfigurationError):
        edge_params(bad)


def test_sinc_spatial_form(sinc):
    x = np.array([0.0, 0.5, 2.0, 7.0])
    np.testing.assert_allclose(sinc.w(x), [1 / math.pi, *(np.sin(x[1:]) / (math.pi * x[1:]))])
    # default quadrature route agrees with the closed form
    np.testing.assert_allclose(CustomKernel.w(sinc, x), sinc.w(x), atol=1e-13)


def test_custom_kernel_w_by_quadrature(fan):
    kern = CustomKernel(name="fan-copy", A=8.0, alpha=3.0, phi_fn=lambda t: (1 - t * t) ** 3)
    x = np.linspace(-10, 10, 41)
    np.testing.assert_allclose(kern.w(x), fan.w(x), atol=1e-13)


def test_registry():
    assert isinstance(get_kernel("fan-order-3"), FanKernel)
    assert isinstance(get_kernel("sinc"), SincKernel)
    with pytest.raises(ConfigurationError):
        get_kernel("epanechnikov")
