from dataclasses import dataclass


@dataclass(frozen=True)
class ZParams:
    """Index of the self-similar limit process ``Z``.

    Attributes:
        c: Log-tail index, ``0 < c < 1`` so that ``Z`` hits zero almost surely.
    """

    c: float

    def __post_init__(self) -> None:
        if not 0 < self.c < 1:
            raise ValueError(f"Expected 0 < c < 1 but got {self.c}.")


@dataclass(frozen=True)
class SpecialFnAccuracy:
    """Stopping rule for continued fractions and quadratures.

    Attributes:
        abs_tol: Target absolute error.
        max_iter: Maximum number of continued fraction iterations.
    """

    abs_tol: float = 1e-12
    max_iter: int = 10_000

    def __post_init__(self) -> None:
        if not self.abs_tol > 0:
            raise ValueError(f"Expected positive abs_tol but got {self.abs_tol}.")
        if self.max_iter < 1:
            raise ValueError(f"Expected positive max_iter but got {self.max_iter}.")


DEFAULT_ACCURACY = SpecialFnAccuracy()
