"""Deconvolution kernel density estimation with vanishing error variance."""

__version__ = "0.1.0"

from .densities import (CustomTarget, Gaussian, GaussianError, GaussianMixture,
                        LaplaceError, OrdinarySmooth, Supersmooth, nsr)
from .kernels import FanKernel, SincKernel, edge_params
from .deconvolver import EstimateConfig, estimate, compute_wr, make_grid
from .asymptotics import (SupersmoothConstants, mean_theory, sd_thm1, sd_thm2,
                          sd_thm3_exact, sd_thm3_expansion, theory_curves)
from .bandwidth import mise, select_bandwidth
from .simulation import ExperimentConfig, figure_config, run_experiment

__all__ = [
    "CustomTarget", "Gaussian", "GaussianError", "GaussianMixture", "LaplaceError",
    "OrdinarySmooth", "Supersmooth", "nsr", "FanKernel", "SincKernel", "edge_params",
    "EstimateConfig", "estimate", "compute_wr", "make_grid", "SupersmoothConstants",
    "mean_theory", "sd_thm1", "sd_thm2", "sd_thm3_exact", "sd_thm3_expansion",
    "theory_curves", "mise", "select_bandwidth", "ExperimentConfig", "figure_config",
    "run_experiment",
]
