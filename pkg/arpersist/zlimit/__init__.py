from .betainc import reg_inc_beta
from .doob import cond_limit_marginal_cdf, hat_marginal_cdf, hat_marginal_cdf_closed
from .hitting import (
    harmonic_identity_residual,
    sample_exp_functional,
    sample_t0,
    t0_from_uniform,
    t0_small_start_asymptote,
    t0_tail,
)
from .kernel import (
    sample_z_path_marginal,
    z_atom_mass,
    z_step_sample,
    z_transition_cdf,
    z_transition_pdf,
)
from .models import DEFAULT_ACCURACY, SpecialFnAccuracy, ZParams

__all__ = [
    "DEFAULT_ACCURACY",
    "SpecialFnAccuracy",
    "ZParams",
    "cond_limit_marginal_cdf",
    "harmonic_identity_residual",
    "hat_marginal_cdf",
    "hat_marginal_cdf_closed",
    "reg_inc_beta",
    "sample_exp_functional",
    "sample_t0",
    "sample_z_path_marginal",
    "t0_from_uniform",
    "t0_small_start_asymptote",
    "t0_tail",
    "z_atom_mass",
    "z_step_sample",
    "z_transition_cdf",
    "z_transition_pdf",
]
