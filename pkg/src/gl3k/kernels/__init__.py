"""Archimedean side: spectral parameters, Bessel functions and long-element kernels."""

from .bessel import bessel_J_pm, bessel_Ktilde, jpm_vec, ktilde_intrep, ktilde_vec
from .integrals import (
    J_double,
    KernelQuery,
    KernelValue,
    gamma_factor,
    kernel_mm_weyl_sum,
    kernel_mp_weyl_sum,
    kernel_pm_weyl_sum,
    kernel_pp_bessel,
    mellin_barnes_pp,
    trig_factor,
    trig_identity_residual,
)
from .spectral import (
    WEYL_LABELS,
    SpectralPoint,
    TestFunctionParams,
    VolumeResult,
    log_slope,
    main_term_volume,
    nu_coords,
    spec_measure,
    test_function_h,
    weyl_action,
)

__all__ = [
    "bessel_J_pm", "bessel_Ktilde", "jpm_vec", "ktilde_intrep", "ktilde_vec",
    "J_double", "KernelQuery", "KernelValue", "gamma_factor", "kernel_mm_weyl_sum",
    "kernel_mp_weyl_sum", "kernel_pm_weyl_sum", "kernel_pp_bessel", "mellin_barnes_pp",
    "trig_factor", "trig_identity_residual",
    "WEYL_LABELS", "SpectralPoint", "TestFunctionParams", "VolumeResult", "log_slope",
    "main_term_volume", "nu_coords", "spec_measure", "test_function_h", "weyl_action",
]
