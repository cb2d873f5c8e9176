"""Kernels whose Fourier transforms are supported on [-1, 1].

A kernel is described by its Fourier transform ``phi``, its spatial form
``w`` and the edge behaviour ``phi(1 - t) = A t**alpha + o(t**alpha)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _quadrature
from .errors import ConfigurationError


@dataclass(frozen=True)
class KernelSpec:
    """Base class; subclasses override :meth:`phi` and optionally :meth:`w`."""

    name: str
    A: float
    alpha: float

    def phi(self, t):
        raise NotImplementedError

    def w(self, x):
        """Spatial kernel by quadrature of ``(1/pi) int_0^1 cos(tx) phi(t) dt``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        panels = 8 + int(np.ceil(np.max(np.abs(x), initial=0.0) / 4.0))
        t, wt = _quadrature.nodes_weights(_quadrature.uniform_breaks(0.0, 1.0, panels))
        out = (np.cos(np.outer(x, t)) * self.phi(t)) @ wt / math.pi
        return out

    def phi_sq_integral(self):
        """``int_{-1}^{1} phi(t)**2 dt``."""
        return 2.0 * _quadrature.integrate(lambda t: self.phi(t) ** 2, [0.0, 1.0], order=64)


def _fan_taylor_coefficients(degree=20):
    # w(x) = (1/pi) sum_k (-1)^k x^(2k) / (2k)! * int_0^1 t^(2k) (1 - t^2)^3 dt
    coefs = []
    for k in range(degree // 2 + 1):
        m = 1 / (2 * k + 1) - 3 / (2 * k + 3) + 3 / (2 * k + 5) - 1 / (2 * k + 7)
        coefs.append((-1) ** k * m / math.factorial(2 * k) / math.pi)
    return np.array(coefs)


_FAN_TAYLOR = _fan_taylor_coefficients()
FAN_CROSSOVER = 0.5


@dataclass(frozen=True)
class FanKernel(KernelSpec):
    """Kernel with ``phi(t) = (1 - t**2)**3`` on [-1, 1]."""

    name: str = "fan-order-3"
    A: float = 8.0
    alpha: float = 3.0

    def phi(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(np.abs(t) <= 1.0, (1.0 - t * t) ** 3, 0.0)

    def w(self, x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        small = ax < FAN_CROSSOVER
        out = np.empty_like(ax)
        xs = ax[small]
        out[small] = np.polynomial.polynomial.polyval(xs * xs, _FAN_TAYLOR)
        out[~small] = self._closed_form(ax[~small])
        return out

    @staticmethod
    def _closed_form(x):
        # unstable for small |x|: the terms are O(x**-7) and cancel
        c, s = np.cos(x), np.sin(x)
        return (48.0 * c / (math.pi * x ** 4) * (1.0 - 15.0 / x ** 2)
                - 144.0 * s / (math.pi * x ** 5) * (2.0 - 5.0 / x ** 2))

    def phi_sq_integral(self):
        # 2 * int_0^1 (1 - t^2)^6 dt
        return 2.0 * 1024.0 / 3003.0


@dataclass(frozen=True)
class SincKernel(KernelSpec):
    """``phi`` is the indicator of [-1, 1]; ``w(x) = sin(x) / (pi x)``."""

    name: str = "sinc"
    A: float = 1.0
    alpha: float = 0.0

    def phi(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(np.abs(t) <= 1.0, 1.0, 0.0)

    def w(self, x):
        x = np.asarray(x, dtype=float)
        return np.sinc(x / math.pi) / math.pi

    def phi_sq_integral(self):
        return 2.0


@dataclass(frozen=True)
class CustomKernel(KernelSpec):
    """Kernel given only through ``phi_fn`` (restricted to [-1, 1])."""

    phi_fn: Callable = None

    def phi(self, t):
        t = np.asarray(t, dtype=float)
        inside = np.abs(t) <= 1.0
        return np.where(inside, self.phi_fn(np.where(inside, t, 0.0)), 0.0)


def edge_params(kernel, check=True):
    """Return ``(A, alpha)`` and optionally confirm the edge expansion.

    The check evaluates ``phi(1 - t) / t**alpha`` at ``t = 1e-4`` and
    ``t = 1e-5`` and requires both to be within 1% of ``A``.
    """
    A, alpha = kernel.A, kernel.alpha
    if check:
        t = np.array([1e-4, 1e-5])
        ratio = kernel.phi(1.0 - t) / t ** alpha
        if not np.all(np.abs(ratio - A) <= 0.01 * abs(A)):
            raise ConfigurationError(
                f"kernel {kernel.name!r}: phi(1-t)/t^{alpha:g} -> {ratio.tolist()}"
                f" does not approach A={A:g}")
    return A, alpha


KERNELS = {
    "fan-order-3": FanKernel,
    "sinc": SincKernel,
}


def get_kernel(name):
    try:
        return KERNELS[name]()
    except KeyError:
        raise ConfigurationError(
            f"unknown kernel {name!r}; choose from {sorted(KERNELS)}") from None
