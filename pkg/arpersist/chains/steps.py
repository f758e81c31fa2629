import numpy as np

from arpersist.innovations.distributions import ArrayLike


def step_random_exchange(r: ArrayLike, eta: ArrayLike) -> ArrayLike:
    """One step ``max(r - 1, eta)`` of the random exchange chain."""
    out = np.maximum(np.asarray(r, dtype=float) - 1.0, eta)
    return float(out) if np.ndim(out) == 0 else out


def step_ar_log(l: ArrayLike, eta: ArrayLike, A: float) -> ArrayLike:
    """One AR(1) step ``log_A(A^(l-1) + A^eta)`` on the logarithmic scale.

    Evaluated as ``m + log_A(1 + A^-|l-1-eta|)`` with ``m = max(l - 1, eta)``, so states of
    any magnitude stay finite.

    Args:
        l: Current state(s) ``log_A X``.
        eta: Log-innovation(s).
        A: Base, ``A > 1``.

    Returns:
        Next state(s), always in ``[m, m + log_A 2]``.
    """
    if A <= 1:
        raise ValueError(f"Expected A > 1 but got {A}.")
    ln_a = np.log(A)
    shifted = np.asarray(l, dtype=float) - 1.0
    top = np.maximum(shifted, eta)
    out = top + np.log1p(np.exp(-np.abs(shifted - eta) * ln_a)) / ln_a
    return float(out) if np.ndim(out) == 0 else out
