"""Kernel quadrature with determinantal node sets.

Nodes are drawn from a projection determinantal point process built from the
leading eigenfunctions of a reproducing kernel, weights come from an
unregularized least-squares fit of the kernel mean embedding, and the package
ships the baselines, theory oracles, and experiment harness used to study the
resulting worst-case integration error.
"""

from .backend import backend_name
from .errors import (
    ConfigError,
    DegenerateNodes,
    DppQuadError,
    InsufficientData,
    LengthMismatch,
    NegativeError,
    NotAPower,
    RankDeficient,
    RejectionStalled,
    SingularGram,
    UnsupportedIntegrand,
)
from .spectral import (
    CONSTANT_ONE,
    Integrand,
    KernelSpec,
    SpectralBasis,
    eigen_integrand,
    eigenfunction_eval,
    eigenvalue,
    flat_capped_spec,
    gaussian_spec,
    kernel_eval,
    kernel_matrix,
    korobov_spec,
    mean_element_eval,
    mean_element_norm_sq,
    sobolev_spec,
    spectral_basis,
    spectral_tail,
    truncate,
)

__version__ = "0.1.0"

__all__ = [
    "CONSTANT_ONE",
    "ConfigError",
    "DegenerateNodes",
    "DppQuadError",
    "InsufficientData",
    "Integrand",
    "KernelSpec",
    "LengthMismatch",
    "NegativeError",
    "NotAPower",
    "RankDeficient",
    "RejectionStalled",
    "SingularGram",
    "SpectralBasis",
    "UnsupportedIntegrand",
    "backend_name",
    "eigen_integrand",
    "eigenfunction_eval",
    "eigenvalue",
    "flat_capped_spec",
    "gaussian_spec",
    "kernel_eval",
    "kernel_matrix",
    "korobov_spec",
    "mean_element_eval",
    "mean_element_norm_sq",
    "sobolev_spec",
    "spectral_basis",
    "spectral_tail",
    "truncate",
    "__version__",
]
