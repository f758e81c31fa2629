import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

PROBABILITY_SUM_TOL = 1e-12


class ChainClassification(Enum):
    """Recurrence class shared by the AR(1), max-AR and random exchange chains.

    For nonnegative innovations the three chains are recurrent, positive recurrent or
    transient at the same time, so one label describes all of them.
    """

    POSITIVE_RECURRENT = "positive-recurrent"
    NULL_RECURRENT = "null-recurrent"
    TRANSIENT = "transient"
    CRITICAL_UNRESOLVED = "critical-unresolved"


@dataclass(frozen=True)
class LogTail:
    """Canonical logarithmic-tail family for the log-innovations.

    The survival function is ``c / (c + y)`` for ``y >= 0``, so ``P(eta > y) ~ c / y``
    and ``P(xi > x) ~ c log(A) / log(x)`` for ``xi = A**eta``.

    Attributes:
        c: Tail index. ``c < 1`` gives null-recurrent chains, ``c > 1`` transient ones.
    """

    c: float

    def __post_init__(self) -> None:
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError(f"Expected positive finite c but got {self.c}.")


@dataclass(frozen=True)
class ShiftedPareto:
    """Shifted Pareto (Lomax) law with survival ``(1 + y / scale) ** (-alpha)``."""

    alpha: float
    scale: float = 1.0

    def __post_init__(self) -> None:
        if not self.alpha > 1:
            raise ValueError(f"Expected alpha > 1 but got {self.alpha}.")
        if not self.scale > 0:
            raise ValueError(f"Expected positive scale but got {self.scale}.")


@dataclass(frozen=True)
class Weibull:
    """Heavy-tailed Weibull law with survival ``exp(-(y / scale) ** beta)``, ``0 < beta < 1``."""

    beta: float
    scale: float = 1.0

    def __post_init__(self) -> None:
        if not 0 < self.beta < 1:
            raise ValueError(f"Expected 0 < beta < 1 but got {self.beta}.")
        if not self.scale > 0:
            raise ValueError(f"Expected positive scale but got {self.scale}.")


@dataclass(frozen=True)
class LogNormalTail:
    """Lognormal law: ``log(eta)`` is normal with mean ``mu`` and deviation ``sigma``."""

    mu: float
    sigma: float

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError(f"Expected positive sigma but got {self.sigma}.")


@dataclass(frozen=True)
class DiscreteInteger:
    """Finite law on the integers ``0..K``, used for exact brute-force oracles.

    Probabilities must sum to one within ``1e-12``; they are renormalized exactly on
    construction.

    Attributes:
        probs: Probability of each support point; index equals the support point.
    """

    probs: tuple[float, ...]
    _cdf: np.ndarray = field(init=False, repr=False, compare=False)
    _sf: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("Expected a non-empty vector of probabilities.")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise ValueError(f"Expected finite non-negative probabilities but got {self.probs}.")
        total = float(probs.sum())
        if abs(total - 1.0) > PROBABILITY_SUM_TOL:
            raise ValueError(f"Expected probabilities summing to 1 but got sum {total!r}.")
        probs = probs / total
        # cdf[k] = P(eta <= k), sf[k] = P(eta > k); suffix sums keep small tails accurate
        cdf = np.cumsum(probs)
        cdf[-1] = 1.0
        sf = np.append(np.cumsum(probs[::-1])[::-1][1:], 0.0)
        object.__setattr__(self, "probs", tuple(float(p) for p in probs))
        object.__setattr__(self, "_cdf", cdf)
        object.__setattr__(self, "_sf", sf)

    @property
    def support_max(self) -> int:
        """Largest support point ``K``."""
        return len(self.probs) - 1

    @classmethod
    def point_mass(cls, k: int) -> "DiscreteInteger":
        """Degenerate law at the integer ``k >= 0``."""
        if k < 0:
            raise ValueError(f"Expected non-negative support point but got {k}.")
        return cls(tuple([0.0] * k + [1.0]))


InnovationModel = LogTail | ShiftedPareto | Weibull | LogNormalTail | DiscreteInteger
