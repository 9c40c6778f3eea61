"""Linear Schroedinger equation on the half line via the unified transform.

Main entry points: :func:`utm_solve` (pure boundary problem),
:func:`reunify_solve` (initial, forcing and boundary data),
:func:`crank_nicolson_solve` (finite-difference reference) and the
ensemble verifier in :mod:`halfline_utm.verify`.
"""

__version__ = "0.1.0"

from .cauchy import duhamel, free_evolution
from .crank_nicolson import DomainTooSmallError, FdScheme, crank_nicolson_solve
from .ensembles import boundary_ensemble, initial_ensemble
from .extension import extend_field, extend_initial, mean_zero_extension
from .kernels import decay_scan, double_kernel_L, fresnel_partial, kernel_ell, u1_decay_check
from .signals import (ContractError, DomainError, Field2D, Grid, NormSpec, NumericalWarning,
                      ResolutionError, SpaceProfile, SpectralDensity, TimeSignal)
from .spectral import homogeneous_sobolev_norm, mixed_norm, sobolev_norm, w_sr_norm
from .utm import (BoundaryKind, build_H1, build_H2, direct_contour_eval, evaluate_u1, evaluate_u2,
                  neumann_inhomogeneous_solve, reunify_solve, utm_solve)
from .verify import (cauchy_checks, norm_transfer, stability_suite, strichartz_ratio_dirichlet,
                     strichartz_ratio_neumann, trace_regularity_check)

__all__ = [
    "BoundaryKind", "ContractError", "DomainError", "DomainTooSmallError", "FdScheme", "Field2D",
    "Grid", "NormSpec", "NumericalWarning", "ResolutionError", "SpaceProfile", "SpectralDensity",
    "TimeSignal", "boundary_ensemble", "build_H1", "build_H2", "cauchy_checks",
    "crank_nicolson_solve", "decay_scan", "direct_contour_eval", "double_kernel_L", "duhamel",
    "evaluate_u1", "evaluate_u2", "extend_field", "extend_initial", "free_evolution",
    "fresnel_partial", "homogeneous_sobolev_norm", "initial_ensemble", "kernel_ell",
    "mean_zero_extension", "mixed_norm", "neumann_inhomogeneous_solve", "norm_transfer",
    "reunify_solve", "sobolev_norm", "stability_suite", "strichartz_ratio_dirichlet",
    "strichartz_ratio_neumann", "trace_regularity_check", "u1_decay_check", "utm_solve",
    "w_sr_norm",
]
