import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class ChainKind(Enum):
    """The three chains driven by one innovation sequence.

    The max-autoregressive chain is simulated through its logarithm, which is exactly the
    random exchange chain.
    """

    AR_ONE = "ar"
    MAX_AR = "max-ar"
    RANDOM_EXCHANGE = "random-exchange"


@dataclass(frozen=True)
class SimConfig:
    """Simulation setup shared by the Monte Carlo estimators.

    All levels are on the ``log_A`` scale; the AR(1) threshold on the linear scale is
    ``A ** x0_log``.

    Attributes:
        A: Inverse of the contraction factor ``a = 1 / A``.
        x0_log: Threshold.
        start_log: Starting point, above the threshold.
        horizon_cap: Steps after which a replicate counts as censored.
        master_seed: Root of the random stream tree.
        replicates: Number of independent replicates.
    """

    A: float
    x0_log: float
    start_log: float
    horizon_cap: int
    master_seed: int
    replicates: int

    def __post_init__(self) -> None:
        if not (self.A > 1 and math.isfinite(self.A)):
            raise ValueError(f"Expected finite A > 1 but got {self.A}.")
        if not self.start_log > self.x0_log:
            raise ValueError(
                f"Expected start above threshold but got start={self.start_log}, "
                f"x0={self.x0_log}."
            )
        if self.horizon_cap < 1:
            raise ValueError(f"Expected positive horizon cap but got {self.horizon_cap}.")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError(f"Expected a 64-bit non-negative seed but got {self.master_seed}.")
        if self.replicates < 1:
            raise ValueError(f"Expected positive number of replicates but got {self.replicates}.")


@dataclass(frozen=True)
class Hit:
    """Return below the threshold at step ``T``."""

    T: int


@dataclass(frozen=True)
class Censored:
    """No return up to the horizon ``cap``."""

    cap: int


RecurrenceOutcome = Hit | Censored


@dataclass(frozen=True)
class TailEstimate:
    n: int
    p_hat: float
    std_err: float
    replicates: int


@dataclass(frozen=True)
class MeanEstimate:
    """Sample mean of the return time with a normal 95% confidence interval."""

    mean: float
    std_err: float
    ci_low: float
    ci_high: float
    replicates: int


@dataclass(frozen=True, eq=False)
class MarginalSample:
    """Scaled states of the replicates kept after optional conditioning on survival."""

    values: np.ndarray
    kept: int
    replicates: int


@dataclass(frozen=True)
class VEstimate:
    value: float
    std_err: float
    replicates: int
