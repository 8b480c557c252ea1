"""Hilbert space-filling-curve sampling with scrambled van der Corput inputs."""

from .estimators import (EstimatorConfig, ReplicationSet, dnet_estimate, grid_estimate,
                         hsfc_estimate, mc_estimate, replicate)
from .integrands import Integrand, get_integrand
from .scramble import scrambled_vdc_batch
from .stats import empirical_variance, kde, normality_report, standardized_errors

__all__ = [
    "EstimatorConfig", "ReplicationSet", "Integrand", "dnet_estimate", "empirical_variance",
    "get_integrand", "grid_estimate", "hsfc_estimate", "kde", "mc_estimate", "normality_report",
    "replicate", "scrambled_vdc_batch", "standardized_errors",
]

__version__ = "0.1.0"
