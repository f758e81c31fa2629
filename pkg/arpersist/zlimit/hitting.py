import math

import numpy as np
from loguru import logger
from scipy import integrate, optimize, special

from arpersist.errors import ConvergenceError
from arpersist.innovations.distributions import ArrayLike

from .betainc import reg_inc_beta
from .models import DEFAULT_ACCURACY, SpecialFnAccuracy, ZParams

IDENTITY_MAX_ERR = 1e-8


def t0_tail(
    params: ZParams, z: float, t: ArrayLike, acc: SpecialFnAccuracy = DEFAULT_ACCURACY
) -> ArrayLike:
    """Tail ``P_z(T_0 > t)`` of the first hitting time of zero by ``Z``.

    Equals 1 for ``t <= z`` and ``I_{z/t}(1 - c, c)`` afterwards.
    """
    if z <= 0:
        raise ValueError(f"Expected z > 0 but got {z}.")
    tt = np.asarray(t, dtype=float)
    if np.any(tt <= 0):
        raise ValueError(f"Expected t > 0 but got {t}.")
    ratio = np.minimum(z / tt, 1.0)
    out = np.asarray(reg_inc_beta(ratio, 1.0 - params.c, params.c, acc))
    out = np.where(tt <= z, 1.0, out)
    return float(out) if np.ndim(out) == 0 else out


def t0_small_start_asymptote(params: ZParams, z: float, t: float) -> float:
    """Leading term ``z^(1-c) t^(c-1) / ((1 - c) B(c, 1 - c))`` of ``t0_tail`` as ``z / t -> 0``."""
    c = params.c
    return z ** (1.0 - c) * t ** (c - 1.0) / ((1.0 - c) * special.beta(c, 1.0 - c))


def t0_from_uniform(
    params: ZParams, z: float, u: float, acc: SpecialFnAccuracy = DEFAULT_ACCURACY
) -> float:
    """Hitting time ``z / B`` where ``B`` solves ``I_B(1 - c, c) = u``."""
    if not 0 < u <= 1:
        raise ValueError(f"Expected u in (0, 1] but got {u}.")
    if u == 1:
        return z
    c = params.c
    try:
        b = optimize.brentq(
            lambda v: reg_inc_beta(v, 1.0 - c, c, acc) - u,
            0.0,
            1.0,
            xtol=1e-300,
            rtol=acc.abs_tol,
            maxiter=acc.max_iter,
        )
    except RuntimeError as e:
        raise ConvergenceError(f"Inversion of the incomplete beta at u={u} failed.") from e
    return z / b


def sample_t0(
    params: ZParams,
    z: float,
    rng: np.random.Generator,
    size: int | None = None,
    acc: SpecialFnAccuracy = DEFAULT_ACCURACY,
) -> ArrayLike:
    """Draw(s) of ``T_0`` under ``P_z``: ``z / B`` with ``B ~ Beta(1 - c, c)``.

    Single draws invert :func:`reg_inc_beta` by root search; arrays use
    ``scipy.special.betaincinv``.
    """
    if z <= 0:
        raise ValueError(f"Expected z > 0 but got {z}.")
    if size is None:
        return t0_from_uniform(params, z, 1.0 - rng.random(), acc)
    u = 1.0 - rng.random(size)
    return z / special.betaincinv(1.0 - params.c, params.c, u)


def sample_exp_functional(
    params: ZParams, rng: np.random.Generator, trunc_tol: float = 1e-12
) -> float:
    """One draw of ``int_0^inf exp(zeta_s - s) ds`` for compound Poisson ``zeta``.

    ``zeta`` jumps at rate ``c`` by standard exponential amounts. Between jumps the
    integral is accumulated in closed form; once ``exp(level)`` is below
    ``trunc_tol`` times the running sum the jump-free remainder ``exp(level)`` is added.
    """
    if trunc_tol <= 0:
        raise ValueError(f"Expected positive trunc_tol but got {trunc_tol}.")
    level = 0.0
    total = 0.0
    while True:
        gap = rng.exponential(1.0 / params.c)
        total += math.exp(level) * -math.expm1(-gap)
        level -= gap
        rest = math.exp(level)
        if rest < trunc_tol * total:
            return total + rest
        level += rng.exponential(1.0)


def harmonic_identity_residual(
    params: ZParams, x: float, t: float, acc: SpecialFnAccuracy = DEFAULT_ACCURACY
) -> float:
    """Residual of ``int_0^t (t - s)^(1-c) P_x(T_0 in ds) = max(t^(1-c) - x^(1-c), 0)``.

    With the density of ``T_0`` the integrand equals ``x^(1-c) / (B(c, 1 - c) s)`` times the
    algebraic weight ``(s - x)^(c-1) (t - s)^(1-c)``, which quadrature handles exactly.

    Raises:
        ConvergenceError: If the quadrature error exceeds ``1e-8``.
    """
    if x <= 0 or t <= 0:
        raise ValueError(f"Expected x > 0 and t > 0 but got x={x}, t={t}.")
    if t <= x:
        return 0.0
    c = params.c
    value, abserr = integrate.quad(
        lambda s: 1.0 / s,
        x,
        t,
        weight="alg",
        wvar=(c - 1.0, 1.0 - c),
        epsabs=acc.abs_tol,
        epsrel=acc.abs_tol,
        limit=200,
    )
    if abserr > IDENTITY_MAX_ERR:
        raise ConvergenceError(f"Harmonic identity quadrature error {abserr} at x={x}, t={t}.")
    integral = x ** (1.0 - c) * value / special.beta(c, 1.0 - c)
    residual = abs(t ** (1.0 - c) - integral - x ** (1.0 - c))
    logger.debug(f"Harmonic identity residual at c={c}, x={x}, t={t}: {residual}")
    return residual
