import numpy as np
from scipy.special import gammaln

from arpersist.errors import ConvergenceError
from arpersist.innovations.distributions import ArrayLike

from .models import DEFAULT_ACCURACY, SpecialFnAccuracy

FPMIN = 1e-300


def _guard(v: np.ndarray) -> np.ndarray:
    return np.where(np.abs(v) < FPMIN, FPMIN, v)


def _continued_fraction(a: float, b: float, x: np.ndarray, acc: SpecialFnAccuracy) -> np.ndarray:
    """Modified Lentz evaluation of the continued fraction of ``I_x(a, b)``, elementwise."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = np.ones_like(x)
    d = 1.0 / _guard(1.0 - qab * x / qap)
    h = d.copy()
    for m in range(1, acc.max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 / _guard(1.0 + aa * d)
        c = _guard(1.0 + aa / c)
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 / _guard(1.0 + aa * d)
        c = _guard(1.0 + aa / c)
        delta = d * c
        h *= delta
        if np.all(np.abs(delta - 1.0) < acc.abs_tol):
            return h
    raise ConvergenceError(
        f"Incomplete beta continued fraction for a={a}, b={b} needs more than "
        f"{acc.max_iter} iterations."
    )


def reg_inc_beta(
    x: ArrayLike, a: float, b: float, acc: SpecialFnAccuracy = DEFAULT_ACCURACY
) -> ArrayLike:
    """Regularized incomplete beta function ``I_x(a, b)``.

    The continued fraction converges fast for ``x < (a + 1) / (a + b + 2)``; above that
    point the symmetry ``I_x(a, b) = 1 - I_{1-x}(b, a)`` is used.

    Args:
        x: Point(s) in ``[0, 1]``.
        a: First shape, positive.
        b: Second shape, positive.
        acc: Stopping rule.

    Returns:
        ``I_x(a, b)``.

    Raises:
        ValueError: On arguments outside the domain.
        ConvergenceError: If the continued fraction exceeds ``acc.max_iter`` iterations.
    """
    if not (a > 0 and b > 0):
        raise ValueError(f"Expected positive shapes but got a={a}, b={b}.")
    scalar = np.ndim(x) == 0
    xx = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any((xx < 0) | (xx > 1)) or np.any(np.isnan(xx)):
        raise ValueError(f"Expected x in [0, 1] but got {x}.")
    out = np.where(xx >= 1.0, 1.0, 0.0)
    inner = (xx > 0) & (xx < 1)
    if np.any(inner):
        xi = xx[inner]
        log_front = (
            gammaln(a + b) - gammaln(a) - gammaln(b) + a * np.log(xi) + b * np.log1p(-xi)
        )
        front = np.exp(log_front)
        direct = xi < (a + 1.0) / (a + b + 2.0)
        values = np.empty_like(xi)
        if np.any(direct):
            values[direct] = front[direct] * _continued_fraction(a, b, xi[direct], acc) / a
        if np.any(~direct):
            flipped = _continued_fraction(b, a, 1.0 - xi[~direct], acc)
            values[~direct] = 1.0 - front[~direct] * flipped / b
        out[inner] = values
    return float(out[0]) if scalar else out
