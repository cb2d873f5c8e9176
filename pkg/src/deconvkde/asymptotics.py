"""Closed-form mean and standard-deviation predictors.

Three regimes are covered: bounded ``r = sigma/h`` (ordinary kernel-type
variance), ordinary smooth error with ``r -> inf`` and supersmooth error with
``r -> inf``. In the supersmooth case the edge integral

    I(rho) = int_0^1 phi_w(s) s**-lam0 exp(s**lam / (mu rho**lam)) ds

grows like ``exp(1/(mu rho**lam))``; it is carried as a :class:`Scaled`
pair and only exponentiated when forming the final standard deviation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import _quadrature
from .densities import LOG_CEILING, OrdinarySmooth, Supersmooth
from .errors import ConfigurationError, NumericalRegimeError


class Scaled(NamedTuple):
    """The number ``mantissa * exp(log_scale)``."""

    mantissa: float
    log_scale: float

    @property
    def log(self):
        return math.log(self.mantissa) + self.log_scale

    @property
    def value(self):
        return _safe_exp(self.log, "scaled value")


def _safe_exp(x, what):
    if x > math.log(np.finfo(float).max):
        raise NumericalRegimeError(f"{what} exceeds double range (log = {x:.6g})")
    return math.exp(x)


@dataclass(frozen=True)
class SupersmoothConstants:
    C: float
    lam0: float
    lam: float
    mu: float
    A: float
    alpha: float

    def __post_init__(self):
        if not self.lam > 1 or not self.mu > 0 or self.alpha < 0:
            raise ConfigurationError("need lam > 1, mu > 0 and alpha >= 0")

    @classmethod
    def from_models(cls, kernel, error):
        smooth = error.smoothness
        if not isinstance(smooth, Supersmooth):
            raise TypeError(f"{error.name} error is not supersmooth")
        return cls(smooth.C, smooth.lam0, smooth.lam, smooth.mu, kernel.A, kernel.alpha)

    def log_zeta(self, rho):
        return 1.0 / (self.mu * rho ** self.lam)


# ---------------------------------------------------------------------------
# Mean
# ---------------------------------------------------------------------------

def mean_theory(target, kernel, x, h):
    """Expected value of the estimator, ``(f * w_h)(x)``.

    Computed as ``(1/2pi) int_{|t|<=1/h} exp(-itx) phi_f(t) phi_w(ht) dt``.
    Does not depend on the noise level.
    """
    if not h > 0:
        raise ValueError("bandwidth must be positive")
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).ravel()
    tmax = 1.0 / h
    span = np.max(np.abs(flat), initial=0.0)
    panels = 16 + int(np.ceil(tmax * (1.0 + span) / 2.0))
    t, wt = _quadrature.nodes_weights(_quadrature.uniform_breaks(0.0, tmax, panels))
    g = wt * target.cf(t) * kernel.phi(h * t)
    full = np.exp(-1j * np.outer(flat, t)) @ g
    # the integral over t < 0 is the complex conjugate for real f and w
    out = full.real / math.pi
    return out.reshape(x.shape) if x.ndim else float(out[0])


# ---------------------------------------------------------------------------
# Bounded r
# ---------------------------------------------------------------------------

def variance_integral_thm1(kernel, error, r, order=64):
    """``int |w_r(u)|^2 du = (1/2pi) int_{-1}^{1} (phi_w(t) / phi_k(rt))^2 dt``."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    error.check_ratio(r, power=2)
    breaks = _quadrature.uniform_breaks(0.0, 1.0, 8)
    val = _quadrature.integrate(
        lambda t: (kernel.phi(t) * error.inv_cf(r * t)) ** 2, breaks, order)
    return val / math.pi


def sd_thm1(target, kernel, error, x, n, h, sigma):
    """``sqrt(f(x) int |w_r|^2 / (n h))`` with ``r = sigma/h``."""
    v = variance_integral_thm1(kernel, error, sigma / h)
    return np.sqrt(target.pdf(x) * v / (n * h))


# ---------------------------------------------------------------------------
# Supersmooth, r -> inf
# ---------------------------------------------------------------------------

def zeta(rho, mu, lam):
    """``exp(1/(mu rho**lam))``."""
    if not rho > 0:
        raise ValueError("rho must be positive")
    return _safe_exp(1.0 / (mu * rho ** lam), "zeta")


def asnrm2_exact(kernel, constants, rho, order=_quadrature.DEFAULT_ORDER):
    """Edge integral ``I(rho)`` as a :class:`Scaled` pair.

    The substitution ``s = v**(1/(1 - lam0))`` absorbs ``s**-lam0`` into the
    measure so the same rule handles any ``lam0 < 1``.
    """
    if not rho > 0:
        raise ValueError("rho must be positive")
    c = constants
    if c.lam0 >= 1 and kernel.phi(0.0) != 0:
        raise ConfigurationError(
            f"s**-{c.lam0:g} is not integrable at 0 when phi_w(0) != 0")
    eps = c.mu * rho ** c.lam
    p = 1.0 / (1.0 - c.lam0)

    def integrand(v):
        s = v ** p
        return kernel.phi(s) * np.exp(np.expm1(c.lam * np.log(s)) / eps) * p

    # boundary layer of width ~ eps/lam next to s = 1
    breaks = _quadrature.graded_breaks(0.0, 1.0)
    mantissa = _quadrature.integrate(integrand, breaks, order)
    return Scaled(float(mantissa), 1.0 / eps)


def asnrm2_expansion(kernel, constants, rho):
    """``A Gamma(alpha+1) (mu rho**lam / lam)**(1+alpha) exp(1/(mu rho**lam))``, scaled."""
    c = constants
    mantissa = c.A * math.gamma(c.alpha + 1.0) * (c.mu * rho ** c.lam / c.lam) ** (1.0 + c.alpha)
    return Scaled(mantissa, c.log_zeta(rho))


def _log_sd_prefactor(constants, n, sigma, rho):
    # rho**(lam0 - 1) / (pi |C| sigma sqrt(2n))
    c = constants
    return ((c.lam0 - 1.0) * math.log(rho)
            - math.log(math.pi * abs(c.C) * sigma * math.sqrt(2.0 * n)))


def sd_thm3_exact(kernel, constants, n, sigma, h):
    """Supersmooth SD predictor built on the exact edge integral.

    ``rho**(lam0-1) I(rho) / (pi C sigma sqrt(2n))`` with ``rho = h/sigma``.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    rho = h / sigma
    scaled = asnrm2_exact(kernel, constants, rho)
    log_sd = math.log(abs(scaled.mantissa)) + scaled.log_scale + _log_sd_prefactor(constants, n, sigma, rho)
    return _safe_exp(log_sd, "sd_thm3_exact")


def sd_thm3_expansion(kernel, constants, n, sigma, h, with_zeta=True):
    """Supersmooth SD predictor from the asymptotic expansion of ``I(rho)``.

    ``A / (sqrt(2) pi C) (mu/lam)**(1+alpha) Gamma(alpha+1)
    rho**(lam(1+alpha) + lam0 - 1) zeta(rho) / (sqrt(n) sigma)``.

    ``with_zeta=False`` drops the ``zeta(rho)`` factor; kept for comparison
    with tabulated values that omit it.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    c = constants
    rho = h / sigma
    log_sd = (math.log(abs(c.A) / (math.sqrt(2.0) * math.pi * abs(c.C)))
              + (1.0 + c.alpha) * math.log(c.mu / c.lam)
              + math.lgamma(c.alpha + 1.0)
              + (c.lam * (1.0 + c.alpha) + c.lam0 - 1.0) * math.log(rho)
              - math.log(math.sqrt(n) * sigma))
    if with_zeta:
        log_sd += c.log_zeta(rho)
    return _safe_exp(log_sd, "sd_thm3_expansion")


# ---------------------------------------------------------------------------
# Ordinary smooth, r -> inf
# ---------------------------------------------------------------------------

def _moment_integral(kernel, beta, order=64):
    # int_{-1}^{1} |t|^(2 beta) phi_w(t)^2 dt
    breaks = _quadrature.uniform_breaks(0.0, 1.0, 8)
    return 2.0 * _quadrature.integrate(lambda t: t ** (2 * beta) * kernel.phi(t) ** 2, breaks, order)


def sd_thm2(target, kernel, error, x, n, h, sigma):
    """Ordinary smooth SD predictor.

    ``sqrt(f(x) / (2 pi C^2) int |t|^(2 beta) phi_w(t)^2 dt / (n h rho^(2 beta)))``.
    """
    smooth = error.smoothness
    if not isinstance(smooth, OrdinarySmooth):
        raise TypeError(f"{error.name} error is not ordinary smooth")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    rho = h / sigma
    var = (target.pdf(x) * _moment_integral(kernel, smooth.beta)
           / (2.0 * math.pi * smooth.C ** 2) / (n * h * rho ** (2.0 * smooth.beta)))
    return np.sqrt(var)


# ---------------------------------------------------------------------------
# Curves
# ---------------------------------------------------------------------------

@dataclass
class TheoryCurves:
    grid: np.ndarray
    mean: np.ndarray
    sd_thm1: np.ndarray
    sd_thm3_exact: Optional[float] = None
    sd_thm3_expansion: Optional[float] = None
    sd_thm3_expansion_no_zeta: Optional[float] = None
    sd_thm2: Optional[np.ndarray] = None

    @property
    def has_thm3(self):
        return self.sd_thm3_exact is not None

    def columns(self):
        cols = {"x": self.grid, "mean_theory": self.mean, "sd_thm1": self.sd_thm1}
        if self.has_thm3:
            cols["sd_thm3_exact"] = np.full(self.grid.size, self.sd_thm3_exact)
            cols["sd_thm3_expansion"] = np.full(self.grid.size, self.sd_thm3_expansion)
        if self.sd_thm2 is not None:
            cols["sd_thm2"] = self.sd_thm2
        return cols


def _thm3_or_inf(fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except NumericalRegimeError:
        return math.inf


def theory_curves(target, kernel, error, grid, n, h, sigma):
    """All predictors on ``grid``.

    Supersmooth columns are present only for ``sigma > 0`` and a supersmooth
    error; values too large for doubles are reported as ``inf``.
    """
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    curves = TheoryCurves(
        grid=grid,
        mean=mean_theory(target, kernel, grid, h),
        sd_thm1=sd_thm1(target, kernel, error, grid, n, h, sigma),
    )
    if sigma > 0 and isinstance(error.smoothness, Supersmooth):
        consts = SupersmoothConstants.from_models(kernel, error)
        curves.sd_thm3_exact = _thm3_or_inf(sd_thm3_exact, kernel, consts, n, sigma, h)
        curves.sd_thm3_expansion = _thm3_or_inf(sd_thm3_expansion, kernel, consts, n, sigma, h)
        curves.sd_thm3_expansion_no_zeta = _thm3_or_inf(
            sd_thm3_expansion, kernel, consts, n, sigma, h, with_zeta=False)
    if sigma > 0 and isinstance(error.smoothness, OrdinarySmooth):
        curves.sd_thm2 = sd_thm2(target, kernel, error, grid, n, h, sigma)
    return curves
