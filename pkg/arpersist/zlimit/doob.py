import math

from scipy import integrate

from arpersist.errors import ConvergenceError
from arpersist.exact_r import kappa

from .betainc import reg_inc_beta
from .models import DEFAULT_ACCURACY, SpecialFnAccuracy, ZParams

QUAD_MAX_ERR = 1e-9


def cond_limit_marginal_cdf(t: float, y: float) -> float:
    """Limit ``P_x(Z_t <= y | T_0 > t)`` as ``x -> 0``, equal to ``y / (y + t)`` for every ``c``."""
    if t <= 0 or y < 0:
        raise ValueError(f"Expected t > 0 and y >= 0 but got t={t}, y={y}.")
    if math.isinf(y):
        return 1.0
    return y / (y + t)


def _weighted(c: float, alpha: float, upper: float, acc: SpecialFnAccuracy) -> float:
    # int_0^upper s^alpha / (1 + s)^2 ds with the power handled as a quadrature weight
    value, abserr = integrate.quad(
        lambda s: 1.0 / (1.0 + s) ** 2,
        0.0,
        upper,
        weight="alg",
        wvar=(alpha, 0.0),
        epsabs=acc.abs_tol,
        epsrel=acc.abs_tol,
        limit=200,
    )
    if abserr > QUAD_MAX_ERR:
        raise ConvergenceError(f"Quadrature error {abserr} on [0, {upper}] for c={c}.")
    return value


def hat_marginal_cdf(
    params: ZParams, y: float, acc: SpecialFnAccuracy = DEFAULT_ACCURACY
) -> float:
    """Distribution function of ``Z_1`` under the Doob transform started at zero.

    Its density is ``kappa(c) z^(1-c) / (1 + z)^2``. Above 1 the integral is taken in
    ``s = 1 / z``, where the density becomes ``s^(c-1) / (1 + s)^2``.

    Args:
        params: Index of ``Z``.
        y: Level, ``y >= 0``; ``inf`` is allowed.
        acc: Quadrature tolerance.

    Returns:
        ``P(Z_1 <= y)``.
    """
    if y < 0:
        raise ValueError(f"Expected y >= 0 but got {y}.")
    c = params.c
    if y <= 1.0:
        mass = _weighted(c, 1.0 - c, y, acc) if y > 0 else 0.0
    else:
        mass = _weighted(c, 1.0 - c, 1.0, acc) + _weighted(c, c - 1.0, 1.0, acc)
        if not math.isinf(y):
            mass -= _weighted(c, c - 1.0, 1.0 / y, acc)
    return min(kappa(c) * mass, 1.0)


def hat_marginal_cdf_closed(params: ZParams, y: float) -> float:
    """Closed form ``I_{y/(1+y)}(2 - c, c)`` of :func:`hat_marginal_cdf`."""
    if y < 0:
        raise ValueError(f"Expected y >= 0 but got {y}.")
    u = 1.0 if math.isinf(y) else y / (1.0 + y)
    return reg_inc_beta(u, 2.0 - params.c, params.c)
