import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
import scipy.stats

from arpersist.errors import EmptySampleError

KS_COEFFICIENTS = {0.05: 1.36, 0.01: 1.63}
TREND_SLACK = 0.1
TREND_SIGMAS = 3.0


@dataclass(frozen=True, eq=False)
class EmpiricalCdf:
    """Right-continuous empirical distribution function of a sample."""

    sample: np.ndarray

    def __post_init__(self) -> None:
        values = np.sort(np.asarray(self.sample, dtype=float).ravel())
        if values.size == 0:
            raise EmptySampleError("Expected a non-empty sample.")
        object.__setattr__(self, "sample", values)

    @property
    def size(self) -> int:
        return int(self.sample.size)

    def __call__(self, y: float | np.ndarray) -> float | np.ndarray:
        out = np.searchsorted(self.sample, y, side="right") / self.size
        return float(out) if np.ndim(out) == 0 else out


def ks_distance(ecdf: EmpiricalCdf, reference_cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Kolmogorov-Smirnov distance between an empirical and a continuous reference law."""
    return float(scipy.stats.kstest(ecdf.sample, reference_cdf).statistic)


def ks_two_sample(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov statistic."""
    if len(a) == 0 or len(b) == 0:
        raise EmptySampleError("Expected two non-empty samples.")
    return float(scipy.stats.ks_2samp(a, b).statistic)


def ks_critical(n: int, alpha: float = 0.01, m: int | None = None) -> float:
    """Asymptotic critical value of the KS statistic, ``1.63 / sqrt(n)`` at level 0.01.

    With ``m`` the effective size ``n m / (n + m)`` of the two-sample test is used.
    """
    if alpha not in KS_COEFFICIENTS:
        raise ValueError(f"Expected alpha in {sorted(KS_COEFFICIENTS)} but got {alpha}.")
    size = n if m is None else n * m / (n + m)
    return KS_COEFFICIENTS[alpha] / math.sqrt(size)


def ratio_trend(
    pairs: Sequence[tuple[int, float]],
    tol: float,
    rel_errors: Sequence[float] | None = None,
) -> bool:
    """Acceptance rule for ratios that should tend to one along increasing ``n``.

    Passes iff ``|ratio - 1|`` does not grow by more than 10% between consecutive points and
    the last deviation is below ``tol``. Relative standard errors, when given, widen every
    comparison by three of them.

    Args:
        pairs: ``(n, ratio)`` with strictly increasing ``n``, at least three points.
        tol: Bound on the final deviation.
        rel_errors: Optional relative standard errors of the ratios.

    Returns:
        The verdict.
    """
    if len(pairs) < 3:
        raise ValueError(f"Expected at least 3 points but got {len(pairs)}.")
    ns = [n for n, _ in pairs]
    if any(a >= b for a, b in zip(ns, ns[1:])):
        raise ValueError(f"Expected increasing n but got {ns}.")
    errors = list(rel_errors) if rel_errors is not None else [0.0] * len(pairs)
    if len(errors) != len(pairs):
        raise ValueError("Expected one relative error per point.")
    deviations = [abs(ratio - 1.0) for _, ratio in pairs]
    for i in range(len(pairs) - 1):
        allowed = deviations[i] * (1.0 + TREND_SLACK) + TREND_SIGMAS * (errors[i] + errors[i + 1])
        if deviations[i + 1] > allowed:
            return False
    return deviations[-1] < tol + TREND_SIGMAS * errors[-1]
