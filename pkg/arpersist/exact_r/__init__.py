from .integrals import (
    c_big,
    cj,
    cj_constant,
    drift_residual,
    drift_threshold,
    integrated_tail,
    kappa,
    renewal_upper_bound,
    u0_drift,
    u0_drift_exchange,
    u0_integral,
    ueps_integral,
    upper_bound_start,
)
from .models import CdfGrid, HarmonicTable, TableColumns, TailTable
from .tables import (
    cdf_grid,
    cell_index,
    check_harmonicity,
    expected_T_exact,
    harmonic_G,
    harmonic_growth_ratio,
    harmonic_table,
    infinite_product,
    karamata_prefactor,
    recurrence_partial_sums,
    tail_at,
    tail_table,
    transient_asymptote,
    transient_return_prob,
)

__all__ = [
    "CdfGrid",
    "HarmonicTable",
    "TableColumns",
    "TailTable",
    "c_big",
    "cdf_grid",
    "cell_index",
    "check_harmonicity",
    "cj",
    "cj_constant",
    "drift_residual",
    "drift_threshold",
    "expected_T_exact",
    "harmonic_G",
    "harmonic_growth_ratio",
    "harmonic_table",
    "infinite_product",
    "integrated_tail",
    "karamata_prefactor",
    "kappa",
    "recurrence_partial_sums",
    "renewal_upper_bound",
    "tail_at",
    "tail_table",
    "transient_asymptote",
    "transient_return_prob",
    "u0_drift",
    "u0_drift_exchange",
    "u0_integral",
    "ueps_integral",
    "upper_bound_start",
]
