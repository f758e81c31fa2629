from .models import (
    Censored,
    ChainKind,
    Hit,
    MarginalSample,
    MeanEstimate,
    RecurrenceOutcome,
    SimConfig,
    TailEstimate,
    VEstimate,
)
from .montecarlo import (
    check_return_hypothesis,
    estimate_expected_T,
    estimate_tail,
    estimate_V,
    return_level,
    sample_scaled_marginal,
    simulate_recurrence_time,
)
from .steps import step_ar_log, step_random_exchange
from .streams import BLOCK_SIZE, block_generator, block_sizes

__all__ = [
    "BLOCK_SIZE",
    "Censored",
    "ChainKind",
    "Hit",
    "MarginalSample",
    "MeanEstimate",
    "RecurrenceOutcome",
    "SimConfig",
    "TailEstimate",
    "VEstimate",
    "block_generator",
    "block_sizes",
    "check_return_hypothesis",
    "estimate_V",
    "estimate_expected_T",
    "estimate_tail",
    "return_level",
    "sample_scaled_marginal",
    "simulate_recurrence_time",
    "step_ar_log",
    "step_random_exchange",
]
