"""Operators, kernels and spectral certificates for totally positive symbols."""
from .config import RunConfig, load_config, preset, preset_catalog
from .errors import (ConfigError, ConvergenceError, DimensionError, DomainError, IndexRangeError,
                     ResourceLimitError, SingularMatrixError, TPSpectraError, TruncationError)
from .kernel import KernelBundle, kernel_blocks, kernel_direct, kernel_series, verify_theorem1, z_kernel
from .operators import build_a, build_b, build_l, build_t, product_atb, project_tail
from .schur import (MeasureContext, Partition, enumerate_partitions, normalization_z,
                    normalization_z_closed_form, schur_giambelli, schur_jacobi_trudi, verify_theorem3)
from .series import SymbolParams, TruncatedSeries, e_coefficients, h_coefficients, ratio_window
from .spectral import (audit_total_positivity, lemma6_check, lemma6_trials, spectrum_verdict,
                       structured_lemma6, sweep_convergence, verify_theorem4)
from .suites import run_suite

__version__ = "0.1.0"

__all__ = [
    "RunConfig", "load_config", "preset", "preset_catalog",
    "ConfigError", "ConvergenceError", "DimensionError", "DomainError", "IndexRangeError",
    "ResourceLimitError", "SingularMatrixError", "TPSpectraError", "TruncationError",
    "KernelBundle", "kernel_blocks", "kernel_direct", "kernel_series", "verify_theorem1", "z_kernel",
    "build_a", "build_b", "build_l", "build_t", "product_atb", "project_tail",
    "MeasureContext", "Partition", "enumerate_partitions", "normalization_z", "normalization_z_closed_form",
    "schur_giambelli", "schur_jacobi_trudi", "verify_theorem3",
    "SymbolParams", "TruncatedSeries", "e_coefficients", "h_coefficients", "ratio_window",
    "audit_total_positivity", "lemma6_check", "lemma6_trials", "spectrum_verdict", "structured_lemma6",
    "sweep_convergence", "verify_theorem4", "run_suite",
]
