"""Noise-adaptive low-rank matrix denoising.

Estimate a low-rank signal observed through i.i.d. additive noise with
an unknown distribution: a shift-corrected kernel estimate of the noise
density drives an entrywise score transform, the transformed matrix is
rescaled by the estimated Fisher information, and its singular values
are threshold-shrunk through the closed-form spiked-model inverse map.
Closed-form asymptotic predictions and a reproducible Monte-Carlo
harness round out the package.
"""

from .estimator import (DenoiseResult, DenoiserParams, baseline_estimate,
                        default_params, denoise, denoise_entrywise,
                        oracle_denoise)
from .kde import (DensityEstimate, ExactDensity, KdeSettings, gaussian_kernel,
                  gaussian_kernel_deriv, kde_binned, kde_exact, mean_entry)
from .linalg import (Svd, op_norm, read_matrix_csv, subspace_overlap, svd,
                     write_matrix_csv)
from .noise import (Gaussian, GaussianMixture, NoiseModel, TabulatedDensity,
                    adaptive_simpson)
from .shrinkage import (PerturbationCheck, bulk_edge,
                        check_spectral_map_perturbation, debiased_sv,
                        inflated_sv, shrink_adaptive, shrink_known_sd)
from .sim import (ExperimentConfig, SignalSpec, TrialRecord, haar_orthonormal,
                  load_config, make_signal, run_grid, run_trial)
from .theory import (Prediction, error_limit, factor_overlap_limits,
                     minimax_limits, overlap_limit, predict,
                     singular_value_limit)

__version__ = "0.1.0"

__all__ = [
    "DenoiseResult", "DenoiserParams", "baseline_estimate", "default_params",
    "denoise", "denoise_entrywise", "oracle_denoise",
    "DensityEstimate", "ExactDensity", "KdeSettings", "gaussian_kernel",
    "gaussian_kernel_deriv", "kde_binned", "kde_exact", "mean_entry",
    "Svd", "op_norm", "read_matrix_csv", "subspace_overlap", "svd",
    "write_matrix_csv",
    "Gaussian", "GaussianMixture", "NoiseModel", "TabulatedDensity",
    "adaptive_simpson",
    "PerturbationCheck", "bulk_edge", "check_spectral_map_perturbation",
    "debiased_sv", "inflated_sv", "shrink_adaptive", "shrink_known_sd",
    "ExperimentConfig", "SignalSpec", "TrialRecord", "haar_orthonormal",
    "load_config", "make_signal", "run_grid", "run_trial",
    "Prediction", "error_limit", "factor_overlap_limits", "minimax_limits",
    "overlap_limit", "predict", "singular_value_limit",
    "__version__",
]
