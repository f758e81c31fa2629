from .distributions import (
    cdf,
    classify,
    log_insens_ratio,
    log_tail_d,
    mean_excess,
    mean_upper,
    quantile,
    sample,
    sstar_ratio,
    tail,
)
from .models import (
    ChainClassification,
    DiscreteInteger,
    InnovationModel,
    LogNormalTail,
    LogTail,
    ShiftedPareto,
    Weibull,
)
from .specs import format_model, load_discrete, parse_model

__all__ = [
    "ChainClassification",
    "DiscreteInteger",
    "InnovationModel",
    "LogNormalTail",
    "LogTail",
    "ShiftedPareto",
    "Weibull",
    "cdf",
    "classify",
    "format_model",
    "load_discrete",
    "log_insens_ratio",
    "log_tail_d",
    "mean_excess",
    "mean_upper",
    "parse_model",
    "quantile",
    "sample",
    "sstar_ratio",
    "tail",
]
