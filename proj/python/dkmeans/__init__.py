"""Diffusion K-means clustering by SDP relaxation."""

from ._core import (
    Error,
    NumericalError,
    SelectionError,
    ValidationError,
    classification_error,
    diffusion_affinity,
    diffusion_steps,
    gaussian_kernel,
    generate,
    l1_error,
    local_bandwidths,
    local_scaling_kernel,
    membership_matrix,
    project_affine,
    project_psd,
    rho_grid,
    round_solution,
    run_cluster,
    select,
    solve_regularized,
    solve_trace,
    spectral_cluster,
    threshold_estimator,
    transition_eigenvalues,
    tuning_path,
)

__all__ = [
    "Error",
    "NumericalError",
    "SelectionError",
    "ValidationError",
    "classification_error",
    "diffusion_affinity",
    "diffusion_steps",
    "gaussian_kernel",
    "generate",
    "l1_error",
    "local_bandwidths",
    "local_scaling_kernel",
    "membership_matrix",
    "project_affine",
    "project_psd",
    "rho_grid",
    "round_solution",
    "run_cluster",
    "select",
    "solve_regularized",
    "solve_trace",
    "spectral_cluster",
    "threshold_estimator",
    "transition_eigenvalues",
    "tuning_path",
]
