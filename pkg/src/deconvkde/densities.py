"""Target densities for the unobserved signal and unit-variance error laws.

Every object here is an immutable dataclass. Samplers take an explicit
:class:`numpy.random.Generator` and hold no state of their own.

User supplied targets must have a finite second moment for the supersmooth
variance predictors to be meaningful; this is not checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import ConfigurationError, NumericalRegimeError

SQRT2PI = math.sqrt(2.0 * math.pi)

# Largest exponent we allow for 1/|phi_k|; leaves headroom below log(DBL_MAX)
# for the quadrature weights and the products they enter.
LOG_CEILING = math.log(np.finfo(float).max) - 20.0


# ---------------------------------------------------------------------------
# Targets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Gaussian:
    """Normal target density with the given mean and variance."""

    mean: float = 0.0
    var: float = 1.0
    name: str = field(default="gaussian", compare=False)

    def __post_init__(self):
        if not self.var > 0:
            raise ConfigurationError("gaussian variance must be positive")

    @property
    def variance(self):
        return self.var

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        sd = math.sqrt(self.var)
        return np.exp(-0.5 * ((x - self.mean) / sd) ** 2) / (SQRT2PI * sd)

    def cf(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(1j * self.mean * t - 0.5 * self.var * t * t)

    def sample(self, count, rng):
        return rng.normal(self.mean, math.sqrt(self.var), size=count)


@dataclass(frozen=True)
class GaussianMixture:
    """Two normal components with a shared variance.

    ``p`` is the weight of the first component.
    """

    mean1: float = -1.0
    mean2: float = 1.0
    var: float = 0.375
    p: float = 0.5
    name: str = field(default="mixture", compare=False)

    def __post_init__(self):
        if not self.var > 0:
            raise ConfigurationError("mixture variance must be positive")
        if not 0.0 <= self.p <= 1.0:
            raise ConfigurationError("mixing probability must lie in [0, 1]")

    @property
    def components(self):
        return Gaussian(self.mean1, self.var), Gaussian(self.mean2, self.var)

    @property
    def variance(self):
        m = self.p * self.mean1 + (1 - self.p) * self.mean2
        second = self.p * self.mean1 ** 2 + (1 - self.p) * self.mean2 ** 2
        return self.var + second - m * m

    def pdf(self, x):
        a, b = self.components
        return self.p * a.pdf(x) + (1 - self.p) * b.pdf(x)

    def cf(self, t):
        a, b = self.components
        return self.p * a.cf(t) + (1 - self.p) * b.cf(t)

    def sample(self, count, rng):
        first = rng.random(count) < self.p
        means = np.where(first, self.mean1, self.mean2)
        return means + math.sqrt(self.var) * rng.standard_normal(count)


@dataclass(frozen=True)
class CustomTarget:
    """Wraps user supplied ``pdf``, ``cf`` and ``sampler(count, rng)``."""

    pdf_fn: Callable
    cf_fn: Callable
    sampler: Callable
    variance: float
    name: str = "custom"

    def pdf(self, x):
        return np.asarray(self.pdf_fn(np.asarray(x, dtype=float)), dtype=float)

    def cf(self, t):
        return np.asarray(self.cf_fn(np.asarray(t, dtype=float)), dtype=complex)

    def sample(self, count, rng):
        return np.asarray(self.sampler(count, rng), dtype=float)


Target = Union[Gaussian, GaussianMixture, CustomTarget]


# ---------------------------------------------------------------------------
# Error models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Supersmooth:
    """phi_k(t) ~ C |t|**lam0 * exp(-|t|**lam / mu) as |t| -> inf."""

    C: float
    lam0: float
    lam: float
    mu: float

    def __post_init__(self):
        if not self.lam > 1:
            raise ConfigurationError("supersmooth order lam must exceed 1")
        if not self.mu > 0:
            raise ConfigurationError("supersmooth scale mu must be positive")


@dataclass(frozen=True)
class OrdinarySmooth:
    """phi_k(t) * t**beta -> C as t -> inf."""

    beta: float
    C: float

    def __post_init__(self):
        if self.beta < 0:
            raise ConfigurationError("ordinary smooth order must be >= 0")
        if self.C == 0:
            raise ConfigurationError("ordinary smooth constant must be nonzero")


class _ErrorBase:
    variance = 1.0

    def log_inv_abs_cf(self, t):
        """``-log|phi_k(t)|``, computed without forming ``phi_k``."""
        raise NotImplementedError

    def max_ratio(self, power=1):
        """Largest ``r`` with ``|phi_k(r)|**-power`` below the float ceiling."""
        raise NotImplementedError

    def inv_cf(self, t):
        # both built-in families have real, positive characteristic functions
        return np.exp(self.log_inv_abs_cf(t))

    def check_ratio(self, r, power=1):
        limit = self.max_ratio(power)
        if not np.isfinite(r) or r > limit:
            raise NumericalRegimeError(
                f"sigma/h = {r:.6g} overflows double precision for the "
                f"{self.name} error; maximum supported ratio is {limit:.6g}",
                max_ratio=limit,
            )


@dataclass(frozen=True)
class GaussianError(_ErrorBase):
    """Standard normal measurement error."""

    name: str = "gaussian"

    @property
    def smoothness(self):
        return Supersmooth(C=1.0, lam0=0.0, lam=2.0, mu=2.0)

    def cf(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(-0.5 * t * t) + 0j

    def log_inv_abs_cf(self, t):
        t = np.asarray(t, dtype=float)
        return 0.5 * t * t

    def max_ratio(self, power=1):
        return math.sqrt(2.0 * LOG_CEILING / power)

    def sample(self, count, rng):
        return rng.standard_normal(count)


@dataclass(frozen=True)
class LaplaceError(_ErrorBase):
    """Laplace error scaled to unit variance, phi_k(t) = 1 / (1 + t**2 / 2)."""

    name: str = "laplace"

    @property
    def smoothness(self):
        return OrdinarySmooth(beta=2.0, C=2.0)

    def cf(self, t):
        t = np.asarray(t, dtype=float)
        return 1.0 / (1.0 + 0.5 * t * t) + 0j

    def log_inv_abs_cf(self, t):
        t = np.asarray(t, dtype=float)
        return np.log1p(0.5 * t * t)

    def max_ratio(self, power=1):
        return math.sqrt(2.0 * math.expm1(LOG_CEILING / power))

    def sample(self, count, rng):
        return rng.laplace(0.0, 1.0 / math.sqrt(2.0), size=count)


ErrorModel = Union[GaussianError, LaplaceError]


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def sample(model, count, rng):
    """Draw ``count`` i.i.d. values from a target or an error model."""
    if count < 1:
        raise ValueError("count must be a positive integer")
    return model.sample(int(count), rng)


def nsr(target, sigma):
    """Noise-to-signal ratio in percent for the model ``Y + sigma * Z``."""
    var = target.variance
    if not var > 0:
        raise ConfigurationError("noise-to-signal ratio needs Var[Y] > 0")
    return 100.0 * sigma * sigma / var


TARGETS = {
    "gaussian": Gaussian,
    "mixture": GaussianMixture,
}

ERRORS = {
    "gaussian": GaussianError,
    "laplace": LaplaceError,
}


def get_target(name):
    try:
        return TARGETS[name]()
    except KeyError:
        raise ConfigurationError(
            f"unknown target {name!r}; choose from {sorted(TARGETS)}") from None


def get_error(name):
    try:
        return ERRORS[name]()
    except KeyError:
        raise ConfigurationError(
            f"unknown error model {name!r}; choose from {sorted(ERRORS)}") from None
