"""Monte Carlo harness: repeated estimation at a fixed bandwidth.

Replication ``j`` draws from its own generator seeded with
``SeedSequence(master_seed, spawn_key=(j,))`` (algorithm tag
``SEED_SCHEME``), so the report depends only on the configuration and not
on the number of worker threads.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np
from scipy import special, stats

from . import __version__
from .asymptotics import TheoryCurves, theory_curves
from .bandwidth import select_bandwidth
from .deconvolver import DEFAULT_BINS, DEFAULT_NODES, EstimateConfig, estimate, make_grid
from .densities import Gaussian, GaussianError, GaussianMixture, Supersmooth, nsr
from .errors import ReplicationError
from .kernels import FanKernel

SEED_SCHEME = "numpy-seedsequence-pcg64/v1"
KS_LEVEL = 0.01

# regime thresholds on s = sigma**lam / h**(lam - 1)
THM1_BELOW = 1.0
THM3_ABOVE = 6.0


@dataclass(frozen=True)
class ExperimentConfig:
    target: object
    error: object
    kernel: object
    n: int
    sigma: float
    h: Union[float, str] = "auto"
    grid: np.ndarray = field(default_factory=lambda: make_grid(-3.0, 3.0, 0.1))
    reps: int = 500
    seed: int = 0
    workers: Optional[int] = None
    nodes: int = DEFAULT_NODES
    bins: int = DEFAULT_BINS

    def __post_init__(self):
        if self.reps < 2:
            raise ValueError("need at least two replications")
        if self.n < 1:
            raise ValueError("sample size must be positive")
        if self.sigma < 0:
            raise ValueError("noise scale must be nonnegative")
        if isinstance(self.h, str) and self.h != "auto":
            raise ValueError("h must be a positive number or 'auto'")

    def resolved(self):
        """Copy with ``h = 'auto'`` replaced by the exact-MISE grid minimiser."""
        if self.h != "auto":
            return self
        h, _ = select_bandwidth(self.target, self.kernel, self.error, self.n, self.sigma)
        return replace(self, h=h)

    def describe(self):
        return {
            "target": _describe(self.target),
            "error": self.error.name,
            "kernel": self.kernel.name,
            "n": int(self.n),
            "sigma": float(self.sigma),
            "h": self.h if isinstance(self.h, str) else float(self.h),
            "grid": [float(self.grid[0]), float(self.grid[-1]), int(self.grid.size)],
            "reps": int(self.reps),
            "seed": int(self.seed),
            "nodes": int(self.nodes),
            "bins": int(self.bins),
        }


def _describe(target):
    params = {k: v for k, v in vars(target).items() if isinstance(v, (int, float))}
    return {"name": target.name, **params}


@dataclass(frozen=True)
class NormalityDiagnostics:
    skewness: float
    excess_kurtosis: float
    ks_statistic: float
    ks_pass: bool


@dataclass
class SimulationReport:
    config: ExperimentConfig
    sample_mean: np.ndarray
    sample_sd: np.ndarray
    theory: TheoryCurves
    diagnostics: list
    values: np.ndarray = field(repr=False)
    regime: Optional[str] = None
    elapsed: float = 0.0

    @property
    def grid(self):
        return self.config.grid

    HEADER = ("x,sample_mean,theory_mean,sample_sd,sd_thm1,sd_thm3_exact,"
              "sd_thm3_expansion,skewness,ex_kurtosis,ks_stat,ks_pass")

    def csv_text(self):
        th = self.theory
        t3e = th.sd_thm3_exact if th.has_thm3 else math.nan
        t3x = th.sd_thm3_expansion if th.has_thm3 else math.nan
        lines = [self.HEADER]
        for i, x in enumerate(self.grid):
            d = self.diagnostics[i]
            nums = (x, self.sample_mean[i], th.mean[i], self.sample_sd[i], th.sd_thm1[i],
                    t3e, t3x, d.skewness, d.excess_kurtosis, d.ks_statistic)
            lines.append(",".join(f"{v:.9g}" for v in nums) + f",{str(d.ks_pass).lower()}")
        return "\n".join(lines) + "\n"

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write(self.csv_text())

    def metadata(self):
        th = self.theory
        return {
            "version": __version__,
            "seed_scheme": SEED_SCHEME,
            "config": self.config.describe(),
            "nsr_percent": nsr(self.config.target, self.config.sigma),
            "regime": self.regime,
            "sd_thm3_exact": th.sd_thm3_exact,
            "sd_thm3_expansion": th.sd_thm3_expansion,
            "sd_thm3_expansion_without_zeta": th.sd_thm3_expansion_no_zeta,
            "wall_clock_seconds": self.elapsed,
        }

    def write_sidecar(self, path):
        with open(path, "w") as fh:
            json.dump(self.metadata(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def at(self, x):
        """Index of the grid point closest to ``x``."""
        return int(np.argmin(np.abs(self.grid - x)))


def child_rng(seed, index):
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(seed, spawn_key=(index,))))


def draw_observations(target, error, n, sigma, rng):
    """``X = Y + sigma Z`` with ``Y`` drawn before ``Z``."""
    y = target.sample(n, rng)
    z = error.sample(n, rng)
    return y + sigma * z


def standardize(values, center=None, scale=None):
    """``(values - center) / scale``; defaults to the sample mean and SD."""
    values = np.asarray(values, dtype=float)
    if center is None:
        center = values.mean()
    if scale is None:
        scale = values.std(ddof=1)
    if not scale > 0:
        raise ValueError("cannot standardise with zero scale")
    return (values - center) / scale


def ks_critical_value(count, level=KS_LEVEL):
    """Asymptotic one-sample Kolmogorov-Smirnov critical value."""
    return special.kolmogi(level) / math.sqrt(count)


def normality_diagnostics(z, level=KS_LEVEL):
    z = np.asarray(z, dtype=float)
    if z.size < 30:
        raise ValueError("normality diagnostics need at least 30 values")
    ks = stats.kstest(z, "norm").statistic
    return NormalityDiagnostics(
        skewness=float(stats.skew(z)),
        excess_kurtosis=float(stats.kurtosis(z, fisher=True)),
        ks_statistic=float(ks),
        ks_pass=bool(ks < ks_critical_value(z.size, level)),
    )


def regime_classifier(error, sigma, h):
    """Advisory label from ``r = sigma/h`` and ``s = sigma**lam / h**(lam-1)``.

    ``s < 1`` is labelled ``"thm1-like"``, ``s >= 6`` ``"thm3-like"`` and
    anything between ``"intermediate"``.
    """
    smooth = error.smoothness
    if not isinstance(smooth, Supersmooth):
        raise TypeError("regime classification needs a supersmooth error")
    if sigma == 0:
        return "thm1-like"
    s = sigma ** smooth.lam / h ** (smooth.lam - 1.0)
    if s < THM1_BELOW:
        return "thm1-like"
    if s >= THM3_ABOVE:
        return "thm3-like"
    return "intermediate"


def _diagnose(column):
    try:
        return normality_diagnostics(standardize(column))
    except ValueError:
        nan = math.nan
        return NormalityDiagnostics(nan, nan, nan, False)


def run_experiment(config):
    """Run all replications and aggregate per grid point."""
    started = time.perf_counter()
    config = config.resolved()
    est_config = EstimateConfig(config.h, config.sigma, config.grid, config.nodes, config.bins)
    config.error.check_ratio(est_config.r)

    def replicate(j):
        try:
            rng = child_rng(config.seed, j)
            x = draw_observations(config.target, config.error, config.n, config.sigma, rng)
            return estimate(x, est_config, config.kernel, config.error).values
        except Exception as exc:
            raise ReplicationError(j, exc) from exc

    workers = config.workers or os.cpu_count() or 1
    if workers == 1:
        rows = [replicate(j) for j in range(config.reps)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(replicate, range(config.reps)))
    values = np.vstack(rows)

    mean = values.mean(axis=0)
    sd = np.sqrt(((values - mean) ** 2).sum(axis=0) / (config.reps - 1))
    theory = theory_curves(config.target, config.kernel, config.error, config.grid,
                           config.n, config.h, config.sigma)
    diagnostics = [_diagnose(values[:, i]) for i in range(config.grid.size)]
    try:
        regime = regime_classifier(config.error, config.sigma, config.h)
    except TypeError:
        regime = None
    return SimulationReport(config=config, sample_mean=mean, sample_sd=sd, theory=theory,
                            diagnostics=diagnostics, values=values, regime=regime,
                            elapsed=time.perf_counter() - started)


FIGURES = {
    "fig1": dict(target="gaussian", sigma=0.1, n=1000, h=0.1),
    "fig3": dict(target="mixture", sigma=0.1, n=1000, h=0.08),
    "fig4": dict(target="gaussian", sigma=0.1, n=10000, h=0.07),
    "fig5": dict(target="gaussian", sigma=0.1, n=100000, h=0.05),
    "fig6": dict(target="gaussian", sigma=1.0, n=100000, h=0.24),
    "fig7": dict(target="gaussian", sigma=2.0, n=100000, h=0.44),
    # bandwidth kept from fig7 on purpose, not re-optimised for the mixture
    "fig8": dict(target="mixture", sigma=2.0, n=100000, h=0.44),
}


def figure_config(fig_id, seed=0, workers=None, reps=500, **overrides):
    """Experiment configuration for one of the published figures."""
    try:
        spec = dict(FIGURES[fig_id])
    except KeyError:
        raise KeyError(f"unknown figure {fig_id!r}; choose from {sorted(FIGURES)}") from None
    spec.update(overrides)
    target = Gaussian() if spec.pop("target") == "gaussian" else GaussianMixture()
    return ExperimentConfig(target=target, error=GaussianError(), kernel=FanKernel(),
                            reps=reps, seed=seed, workers=workers, **spec)
