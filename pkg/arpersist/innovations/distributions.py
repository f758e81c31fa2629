import math

import numpy as np
from loguru import logger
from scipy import integrate, special

from arpersist.errors import ConvergenceError, HypothesisError

from .models import (
    ChainClassification,
    DiscreteInteger,
    InnovationModel,
    LogNormalTail,
    LogTail,
    ShiftedPareto,
    Weibull,
)

QUANTILE_TOL = 1e-12
SSTAR_REL_TOL = 1e-8

ArrayLike = float | np.ndarray


def _finish(values: np.ndarray, scalar: bool) -> ArrayLike:
    return float(values) if scalar else values


def tail(model: InnovationModel, y: ArrayLike) -> ArrayLike:
    """Survival function ``P(eta > y)`` in closed form.

    Args:
        model: Innovation model.
        y: Point or array of points.

    Returns:
        ``P(eta > y)``; equals 1 for ``y < 0`` since every family is nonnegative.
    """
    scalar = np.ndim(y) == 0
    y = np.asarray(y, dtype=float)
    match model:
        case LogTail(c=c):
            out = np.where(y < 0, 1.0, c / (c + np.maximum(y, 0.0)))
        case ShiftedPareto(alpha=alpha, scale=scale):
            out = np.where(y < 0, 1.0, (1.0 + np.maximum(y, 0.0) / scale) ** (-alpha))
        case Weibull(beta=beta, scale=scale):
            out = np.where(y < 0, 1.0, np.exp(-((np.maximum(y, 0.0) / scale) ** beta)))
        case LogNormalTail(mu=mu, sigma=sigma):
            with np.errstate(divide="ignore"):
                z = (np.log(np.maximum(y, 0.0)) - mu) / sigma
            out = np.where(y <= 0, 1.0, special.ndtr(-z))
        case DiscreteInteger():
            idx = np.floor(y)
            inside = (idx >= 0) & (idx < model.support_max)
            safe = np.clip(idx, 0, model.support_max).astype(int)
            out = np.where(y < 0, 1.0, np.where(inside, model._sf[safe], 0.0))
        case _:
            raise TypeError(f"Unsupported innovation model {model!r}.")
    return _finish(out, scalar)


def cdf(model: InnovationModel, y: ArrayLike) -> ArrayLike:
    """Distribution function ``P(eta <= y)``, right-continuous at atoms."""
    scalar = np.ndim(y) == 0
    y = np.asarray(y, dtype=float)
    match model:
        case LogTail(c=c):
            yy = np.maximum(y, 0.0)
            out = np.where(y < 0, 0.0, yy / (c + yy))
        case ShiftedPareto(alpha=alpha, scale=scale):
            out = np.where(y < 0, 0.0, -np.expm1(-alpha * np.log1p(np.maximum(y, 0.0) / scale)))
        case Weibull(beta=beta, scale=scale):
            out = np.where(y < 0, 0.0, -np.expm1(-((np.maximum(y, 0.0) / scale) ** beta)))
        case LogNormalTail(mu=mu, sigma=sigma):
            with np.errstate(divide="ignore"):
                z = (np.log(np.maximum(y, 0.0)) - mu) / sigma
            out = np.where(y <= 0, 0.0, special.ndtr(z))
        case DiscreteInteger():
            idx = np.floor(y)
            safe = np.clip(idx, 0, model.support_max).astype(int)
            out = np.where(y < 0, 0.0, model._cdf[safe])
        case _:
            raise TypeError(f"Unsupported innovation model {model!r}.")
    return _finish(out, scalar)


def _lognormal_quantile(model: LogNormalTail, u: np.ndarray) -> np.ndarray:
    lo = np.zeros_like(u)
    hi = np.full_like(u, max(1.0, math.exp(model.mu)))
    while True:
        short = cdf(model, hi) < u
        if not np.any(short):
            break
        hi = np.where(short, 2.0 * hi, hi)
    # bisection to an absolute width of QUANTILE_TOL, relative width at machine precision
    for _ in range(2000):
        width = hi - lo
        if np.all((width <= QUANTILE_TOL) | (width <= 4 * np.finfo(float).eps * hi)):
            return hi
        mid = 0.5 * (lo + hi)
        below = cdf(model, mid) < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    raise ConvergenceError("Bisection for the lognormal quantile did not converge.")


def _quantile(model: InnovationModel, u: np.ndarray) -> np.ndarray:
    match model:
        case LogTail(c=c):
            return c * u / (1.0 - u)
        case ShiftedPareto(alpha=alpha, scale=scale):
            return scale * np.expm1(-np.log1p(-u) / alpha)
        case Weibull(beta=beta, scale=scale):
            return scale * (-np.log1p(-u)) ** (1.0 / beta)
        case LogNormalTail():
            return _lognormal_quantile(model, u)
        case DiscreteInteger():
            return np.searchsorted(model._cdf, u, side="left").astype(float)
        case _:
            raise TypeError(f"Unsupported innovation model {model!r}.")


def quantile(model: InnovationModel, u: ArrayLike) -> ArrayLike:
    """Generalized inverse ``inf{y : P(eta <= y) >= u}``.

    Closed forms are used for the log-tail, Pareto and Weibull families, bisection for the
    lognormal family and a table walk for discrete laws.

    Args:
        model: Innovation model.
        u: Probability level(s) in ``(0, 1)``.

    Returns:
        The quantile(s).

    Raises:
        ValueError: If any level is outside ``(0, 1)``.
    """
    scalar = np.ndim(u) == 0
    uu = np.asarray(u, dtype=float)
    if np.any((uu <= 0) | (uu >= 1)) or np.any(np.isnan(uu)):
        raise ValueError(f"Expected probability levels in (0, 1) but got {u}.")
    return _finish(_quantile(model, uu), scalar)


def sample(
    model: InnovationModel, rng: np.random.Generator, size: int | None = None
) -> ArrayLike:
    """Inverse-transform draw(s) of ``eta``.

    One uniform is consumed from ``rng`` per draw, so a draw equals ``quantile(u)`` for the
    next uniform ``u`` of the stream.

    Args:
        model: Innovation model.
        rng: Caller-owned generator; it is the only state mutated.
        size: Number of draws; ``None`` returns a single float.

    Returns:
        A float or an array of ``size`` draws.
    """
    u = rng.random() if size is None else rng.random(size)
    # a uniform of exactly zero maps to the bottom of the support
    return _finish(_quantile(model, np.asarray(u, dtype=float)), size is None)


def mean_excess(model: InnovationModel, a: float) -> float:
    """Integrated tail ``E[(eta - a)^+] = int_a^inf P(eta > y) dy``.

    Returns:
        The integrated tail, ``inf`` for the log-tail family.
    """
    if a < 0:
        return mean_excess(model, 0.0) - a
    match model:
        case LogTail():
            return math.inf
        case ShiftedPareto(alpha=alpha, scale=scale):
            return scale / (alpha - 1.0) * (1.0 + a / scale) ** (1.0 - alpha)
        case Weibull(beta=beta, scale=scale):
            return (
                scale
                * special.gamma(1.0 + 1.0 / beta)
                * special.gammaincc(1.0 / beta, (a / scale) ** beta)
            )
        case LogNormalTail(mu=mu, sigma=sigma):
            mean = math.exp(mu + 0.5 * sigma**2)
            if a == 0:
                return mean
            la = math.log(a)
            return float(
                mean * special.ndtr((mu + sigma**2 - la) / sigma)
                - a * special.ndtr((mu - la) / sigma)
            )
        case DiscreteInteger(probs=probs):
            support = np.arange(len(probs), dtype=float)
            return float(np.sum(np.asarray(probs) * np.maximum(support - a, 0.0)))
        case _:
            raise TypeError(f"Unsupported innovation model {model!r}.")


def mean_upper(model: InnovationModel) -> float:
    """Positive mean ``E[eta^+]``; ``inf`` flags the log-tail family."""
    return mean_excess(model, 0.0)


def classify(model: InnovationModel) -> ChainClassification:
    """Recurrence class of the chains driven by ``model``.

    Finite ``E[eta^+]`` means positive recurrence; for log-tails the index ``c`` decides
    between null recurrence (``c < 1``) and transience (``c > 1``).
    """
    if math.isfinite(mean_upper(model)):
        return ChainClassification.POSITIVE_RECURRENT
    assert isinstance(model, LogTail)
    if model.c < 1:
        return ChainClassification.NULL_RECURRENT
    if model.c > 1:
        return ChainClassification.TRANSIENT
    return ChainClassification.CRITICAL_UNRESOLVED


def log_tail_d(model: LogTail, A: float) -> float:
    """Constant ``d = c log(A)`` of ``P(xi > x) ~ d / log(x)`` for ``xi = A**eta``."""
    if A <= 1:
        raise ValueError(f"Expected A > 1 but got {A}.")
    return model.c * math.log(A)


def sstar_ratio(model: InnovationModel, x: float) -> float:
    """Convolution ratio ``int_0^x F(x-y) F(y) dy / F(x)`` of the strong subexponential class.

    For laws in that class the ratio tends to ``2 E[eta^+]``.

    Raises:
        HypothesisError: If the model has infinite mean or ``P(eta > x) = 0``.
        ConvergenceError: If the quadrature does not reach the relative tolerance.
    """
    if not math.isfinite(mean_upper(model)):
        raise HypothesisError(f"Expected a finite-mean model but got {model!r}.")
    if x <= 0:
        return 0.0
    fx = tail(model, x)
    if fx <= 0:
        raise HypothesisError(f"P(eta > {x}) = 0 for {model!r}.")

    def integrand(y: float) -> float:
        return tail(model, x - y) * tail(model, y) / fx

    points = None
    if isinstance(model, DiscreteInteger):
        # jumps of the integrand at integers and at x minus integers
        jumps = {float(k) for k in range(1, int(x) + 1)} | {x - k for k in range(1, int(x) + 1)}
        points = sorted(p for p in jumps if 0.0 < p < x / 2.0) or None
    # symmetric integrand: twice the integral over [0, x/2]
    value, abserr = integrate.quad(
        integrand, 0.0, x / 2.0, epsabs=0.0, epsrel=SSTAR_REL_TOL, limit=1000, points=points
    )
    if abserr > 1e-6 * max(abs(value), 1.0):
        raise ConvergenceError(f"Quadrature error {abserr} too large at x={x}.")
    logger.debug(f"sstar ratio at x={x}: {2 * value} (quadrature error {abserr})")
    return 2.0 * value


def _log_tail(model: InnovationModel, y: float) -> float:
    # log P(eta > y) without underflow for light tails far out
    if y < 0:
        return 0.0
    match model:
        case LogTail(c=c):
            return math.log(c) - math.log(c + y)
        case ShiftedPareto(alpha=alpha, scale=scale):
            return -alpha * math.log1p(y / scale)
        case Weibull(beta=beta, scale=scale):
            return -((y / scale) ** beta)
        case LogNormalTail(mu=mu, sigma=sigma):
            if y == 0:
                return 0.0
            return float(special.log_ndtr(-(math.log(y) - mu) / sigma))
        case _:
            survival = tail(model, y)
            return math.log(survival) if survival > 0 else -math.inf


def log_insens_ratio(model: InnovationModel, x: float) -> float:
    """Ratio ``P(eta > x - log x) / P(eta > x)``; tends to 1 for log-insensitive tails.

    Evaluated in log scale, so tails far below the smallest double stay finite.

    Raises:
        HypothesisError: If ``P(eta > x) = 0``.
    """
    if x < 1:
        raise ValueError(f"Expected x >= 1 but got {x}.")
    far = _log_tail(model, x)
    if far == -math.inf:
        raise HypothesisError(f"P(eta > {x}) = 0 for {model!r}.")
    return math.exp(_log_tail(model, x - math.log(x)) - far)
