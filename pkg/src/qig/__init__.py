"""Monotone quantum Fisher information, generalized variances and their geometry."""

__version__ = "0.1.0"

from .linalg import (
    DensityMatrix,
    HermitianMatrix,
    QigError,
    TangentVector,
    gell_mann_basis,
    random_density,
    random_tangent,
    spectral_decompose,
)
from .monotone import F_KM, F_MAX, F_MIN, MonotoneFunction, beta_function, parse_function
from .metric import MetricContext, apply_J, apply_J_inv, bloch_split, fisher_info, sld, variance

__all__ = [
    "DensityMatrix",
    "F_KM",
    "F_MAX",
    "F_MIN",
    "HermitianMatrix",
    "MetricContext",
    "MonotoneFunction",
    "QigError",
    "TangentVector",
    "apply_J",
    "apply_J_inv",
    "beta_function",
    "bloch_split",
    "fisher_info",
    "gell_mann_basis",
    "parse_function",
    "random_density",
    "random_tangent",
    "sld",
    "spectral_decompose",
    "variance",
]
