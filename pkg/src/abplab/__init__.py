"""Numerical laboratory for refined sup bounds of plurisubharmonic-type
functions on the unit ball, with parabolic and periodic companions.

The core objects are grids on balls and tori, discrete complex Hessians,
contact-set determinant entropies, and the sup-bound checkers built from
them.  Everything downstream (flows, iteration bounds, the CLI) composes
these pieces.
"""

from .abp import (AbpConstants, AbpReport, abp_check, abp_drift_check,
                  calibrate_constants, calibrate_trudinger, default_delta,
                  dirichlet_l_infinity_check, paraboloid_family,
                  trudinger_check)
from .contact import ContactReport, contact_set, drift_entropy, entropy_report
from .degiorgi import (DeGiorgiInput, LevelCurves, level_machinery,
                       s_infinity, verify_hypothesis)
from .flow import (FlowConfig, FlowState, SpaceTimeField, calibrate_parabolic,
                   energy_monotonicity_check, flow_solve, frozen_flow_state,
                   monitor_bounds, parabolic_abp_check, parabolic_alpha_check)
from .grid import GridField, GridSpec, integrate_ball, unit_ball_volume
from .hessian import (complex_hessian_at, complex_hessian_fields,
                      neg_hessian_spectrum_fields, real_hessian_at)
from .inequalities import fit_remainder_constant, scalar_inequality_suite
from .ma_radial import (build_h, comparison_check, kolodziej_probe,
                        log_singularity_family, solve_dirichlet_radial,
                        solver_residual)
from .radial import RadialProfile, ball_integral_radial, radial_det
from .torus import (PeriodicSpec, TorusPair, gradient_report, make_pair,
                    positivity_threshold, random_band_shape,
                    single_mode_shape, sweep_family, two_mode_shape)
from .weights import (Weight, default_weight, exp_weight, log_power_weight,
                      power_weight)

__version__ = "0.1.0"

__all__ = [
    "AbpConstants", "AbpReport", "abp_check", "abp_drift_check",
    "calibrate_constants", "calibrate_trudinger", "default_delta",
    "dirichlet_l_infinity_check", "paraboloid_family", "trudinger_check",
    "ContactReport", "contact_set", "drift_entropy", "entropy_report",
    "DeGiorgiInput", "LevelCurves", "level_machinery", "s_infinity",
    "verify_hypothesis",
    "FlowConfig", "FlowState", "SpaceTimeField", "calibrate_parabolic",
    "energy_monotonicity_check", "flow_solve", "frozen_flow_state",
    "monitor_bounds", "parabolic_abp_check", "parabolic_alpha_check",
    "GridField", "GridSpec", "integrate_ball", "unit_ball_volume",
    "complex_hessian_at", "complex_hessian_fields",
    "neg_hessian_spectrum_fields", "real_hessian_at",
    "fit_remainder_constant", "scalar_inequality_suite",
    "build_h", "comparison_check", "kolodziej_probe",
    "log_singularity_family", "solve_dirichlet_radial", "solver_residual",
    "RadialProfile", "ball_integral_radial", "radial_det",
    "PeriodicSpec", "TorusPair", "gradient_report", "make_pair",
    "positivity_threshold", "random_band_shape", "single_mode_shape",
    "sweep_family", "two_mode_shape",
    "Weight", "default_weight", "exp_weight", "log_power_weight",
    "power_weight",
    "__version__",
]
