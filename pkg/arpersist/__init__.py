from arpersist import chains, exact_r, harness, innovations, zlimit

from arpersist.chains import ChainKind, SimConfig
from arpersist.errors import (
    ArpersistError,
    CensoredSampleError,
    ConvergenceError,
    EmptySampleError,
    HypothesisError,
)
from arpersist.harness import Experiment
from arpersist.innovations import ChainClassification, parse_model

__all__ = [
    "ArpersistError",
    "CensoredSampleError",
    "ChainClassification",
    "ChainKind",
    "ConvergenceError",
    "EmptySampleError",
    "Experiment",
    "HypothesisError",
    "SimConfig",
    "chains",
    "exact_r",
    "harness",
    "innovations",
    "parse_model",
    "zlimit",
]
