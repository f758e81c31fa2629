import math

import numpy as np
from loguru import logger
from scipy import integrate

from arpersist.errors import ConvergenceError, HypothesisError
from arpersist.innovations import (
    InnovationModel,
    LogTail,
    mean_excess,
    mean_upper,
    tail,
)
from arpersist.innovations.distributions import ArrayLike

U_REL_TOL = 1e-9
DRIFT_ABS_ERR = 1e-7
C_BIG_START_TERMS = 1 << 10


def _check_eps(model: InnovationModel, eps: float) -> None:
    if eps < 0:
        raise ValueError(f"Expected eps >= 0 but got {eps}.")
    if isinstance(model, LogTail) and eps > 0 and eps * model.c >= 1 - model.c:
        raise ValueError(f"Expected 0 <= eps < (1 - c) / c for c={model.c} but got {eps}.")


def integrated_tail(model: InnovationModel, x: float) -> float:
    """``int_0^x P(eta > y) dy`` for ``x >= 0``, zero otherwise."""
    if x <= 0:
        return 0.0
    if isinstance(model, LogTail):
        return model.c * math.log1p(x / model.c)
    return mean_upper(model) - mean_excess(model, x)


def _u_eps_quad(model: InnovationModel, x: float, eps: float) -> float:
    if x <= 0:
        return 0.0

    def integrand(y: float) -> float:
        return math.exp(-(1.0 + eps) * integrated_tail(model, y))

    value, abserr = integrate.quad(integrand, 0.0, x, epsabs=0.0, epsrel=U_REL_TOL, limit=200)
    if abserr > 1e3 * U_REL_TOL * max(value, 1.0):
        raise ConvergenceError(f"Quadrature of U at x={x} stopped with error {abserr}.")
    return value


def ueps_integral(model: InnovationModel, x: ArrayLike, eps: float) -> ArrayLike:
    """Compute ``U_eps(x) = int_0^x exp(-u_eps(y)) dy``.

    Here ``u_eps(y) = (1 + eps) int_0^y P(eta > s) ds``.

    For the log-tail family the integrand is ``(c / (c + y)) ** b`` with ``b = (1 + eps) c``
    and the closed-form antiderivative is used; other families go through adaptive
    quadrature. ``U_eps`` vanishes on ``x <= 0``.

    Args:
        model: Innovation model.
        x: Point or array of points.
        eps: Exponent perturbation; for log-tails ``0 <= eps < (1 - c) / c``.

    Returns:
        ``U_eps(x)``.

    Raises:
        ValueError: If ``eps`` is out of range.
    """
    _check_eps(model, eps)
    scalar = np.ndim(x) == 0
    xx = np.maximum(np.asarray(x, dtype=float), 0.0)
    if isinstance(model, LogTail):
        c = model.c
        one_minus_b = 1.0 - (1.0 + eps) * c
        log_ratio = np.log1p(xx / c)
        if one_minus_b == 0.0:
            out = c * log_ratio
        else:
            # c^b ((c+x)^(1-b) - c^(1-b)) / (1-b), written to stay accurate near b = 1
            out = c * np.expm1(one_minus_b * log_ratio) / one_minus_b
    else:
        out = np.fromiter(
            (_u_eps_quad(model, float(v), eps) for v in xx.ravel()), dtype=float, count=xx.size
        ).reshape(xx.shape)
    return float(out) if scalar else out


def u0_integral(model: InnovationModel, x: ArrayLike) -> ArrayLike:
    """``U_0(x) = int_0^x exp(-u_0(y)) dy``, the Lyapunov scale of the chains."""
    return ueps_integral(model, x, 0.0)


def kappa(c: float) -> float:
    """Constant ``1 / ((1 - c) B(c, 1 - c)) = sin(pi c) / ((1 - c) pi)``."""
    if not 0 < c < 1:
        raise ValueError(f"Expected 0 < c < 1 but got {c}.")
    return math.sin(math.pi * c) / ((1.0 - c) * math.pi)


def _ar_step(z: float, eta: float, A: float) -> float:
    ln_a = math.log(A)
    return float(np.logaddexp((z - 1.0) * ln_a, eta * ln_a)) / ln_a


def _expected_change(model: LogTail, A: float, z: float, eps_terms: tuple[float, ...]) -> float:
    c = model.c

    def weight(y: float) -> float:
        return sum(ueps_integral(model, y, eps) for eps in eps_terms)

    base = weight(z)

    def integrand(y: float) -> float:
        return (weight(_ar_step(z, y, A)) - base) * c / (c + y) ** 2

    edges = [0.0]
    if z > 1:
        edges.append(z - 1.0)
    edges.append(edges[-1] + 50.0)
    total, error = 0.0, 0.0
    for lo, hi in zip(edges, edges[1:] + [math.inf]):
        value, abserr = integrate.quad(integrand, lo, hi, epsabs=1e-13, epsrel=1e-10, limit=500)
        total += value
        error += abserr
    if error > DRIFT_ABS_ERR:
        raise ConvergenceError(f"Drift quadrature at z={z} stopped with error {error}.")
    logger.debug(f"Drift at z={z} for eps terms {eps_terms}: {total} (error {error})")
    return total


def drift_residual(model: InnovationModel, A: float, z: float, eps: float) -> float:
    """One-step drift of ``U_0 + U_eps`` along the AR(1) chain in log scale.

    Computes ``E[W(log_A(A^(z-1) + A^eta))] - W(z)`` for ``W = U_0 + U_eps``. For
    ``0 < eps < (1 - c) / c`` the drift is non-positive for all large ``z``.

    Raises:
        HypothesisError: If the model is not a log-tail model.
        ValueError: If ``eps`` is out of range.
        ConvergenceError: If the quadrature misses its tolerance.
    """
    if not isinstance(model, LogTail):
        raise HypothesisError(f"Expected a log-tail model but got {model!r}.")
    if A <= 1:
        raise ValueError(f"Expected A > 1 but got {A}.")
    _check_eps(model, eps)
    return _expected_change(model, A, z, (0.0, eps))


def u0_drift(model: InnovationModel, A: float, z: float) -> float:
    """One-step drift ``E[U_0(step)] - U_0(z)`` of the AR(1) chain in log scale; non-negative."""
    if not isinstance(model, LogTail):
        raise HypothesisError(f"Expected a log-tail model but got {model!r}.")
    if A <= 1:
        raise ValueError(f"Expected A > 1 but got {A}.")
    return _expected_change(model, A, z, (0.0,))


def u0_drift_exchange(model: InnovationModel, z: float) -> float:
    """Closed-form drift ``E[U_0(max(z - 1, eta))] - U_0(z)`` of the random exchange chain.

    Integration by parts gives ``U_0(a) + exp(-u_0(a)) - exp(-E eta^+)`` with
    ``a = max(z - 1, 0)``.
    """
    a = max(z - 1.0, 0.0)
    return (
        u0_integral(model, a)
        + math.exp(-integrated_tail(model, a))
        - math.exp(-mean_upper(model))
        - u0_integral(model, z)
    )


def drift_threshold(
    model: InnovationModel, A: float, eps: float, z_grid: list[float]
) -> float | None:
    """Smallest grid point from which the drift of ``U_0 + U_eps`` stays non-positive.

    Args:
        model: Log-tail model.
        A: Base of the logarithmic scale.
        eps: Exponent perturbation.
        z_grid: Increasing grid of levels to scan.

    Returns:
        The threshold, or ``None`` if the drift is positive at the last grid point.
    """
    if not z_grid or any(a >= b for a, b in zip(z_grid, z_grid[1:])):
        raise ValueError(f"Expected a non-empty increasing grid but got {z_grid}.")
    threshold = None
    for z in reversed(z_grid):
        if drift_residual(model, A, z, eps) > 0:
            break
        threshold = z
    logger.info(f"Drift threshold for eps={eps}: {threshold}")
    return threshold


def cj_constant() -> float:
    """``1 / (2 sum_{j>=1} j^-2) = 3 / pi^2``."""
    return 3.0 / math.pi**2


def cj(model: InnovationModel, A: float, y: float, j: ArrayLike) -> ArrayLike:
    """``P(xi > A^j c y / (j + 1)^2)`` with ``xi = A**eta``, evaluated through ``eta``."""
    if A <= 1:
        raise ValueError(f"Expected A > 1 but got {A}.")
    if y <= 0:
        raise ValueError(f"Expected positive y but got {y}.")
    ln_a = math.log(A)
    jj = np.asarray(j, dtype=float)
    return tail(model, jj + math.log(cj_constant() * y) / ln_a - 2.0 * np.log1p(jj) / ln_a)


def c_big(
    model: InnovationModel,
    A: float,
    y: float,
    jmax: int = 1 << 24,
    tol: float = 1e-10,
) -> float:
    """Sum ``C(y) = sum_{j>=0} c_j(y)``.

    The head is summed directly; the rest is estimated by the integral of the tail, with an
    error bound from the monotonicity of ``j - 2 log_A(j + 1)``. The head doubles until the
    bound drops below ``tol``.

    Raises:
        HypothesisError: If the model has infinite mean (the series diverges).
        ConvergenceError: If ``jmax`` terms do not reach ``tol``.
    """
    if not math.isfinite(mean_upper(model)):
        raise HypothesisError(f"C(y) diverges for the infinite-mean model {model!r}.")
    ln_a = math.log(A)
    shift = math.log(cj_constant() * y) / ln_a
    terms = C_BIG_START_TERMS
    while True:
        head = float(np.sum(cj(model, A, y, np.arange(terms))))
        delta = 1.0 - 2.0 / ((terms + 1) * ln_a)
        if delta > 0:
            g = terms + shift - 2.0 * math.log1p(terms) / ln_a
            tail_at_g = float(tail(model, g))
            excess = mean_excess(model, g)
            error = tail_at_g / 2.0 + excess * (1.0 / delta - 1.0)
            if error < tol:
                logger.debug(f"C({y}) summed over {terms} terms, remainder error {error}")
                return head + excess + tail_at_g / 2.0
        if terms >= jmax:
            raise ConvergenceError(f"C({y}) did not reach tolerance {tol} with {jmax} terms.")
        terms = min(2 * terms, jmax)


def upper_bound_start(A: float, x_lin: float, x0_lin: float) -> int:
    """Smallest ``n >= 1`` with ``A^-n x <= x0 / 2``."""
    if A <= 1 or x_lin <= 0 or x0_lin <= 0:
        raise ValueError(f"Expected A > 1 and positive levels but got {A}, {x_lin}, {x0_lin}.")
    return max(1, math.ceil(math.log(2.0 * x_lin / x0_lin) / math.log(A)))


def renewal_upper_bound(
    model: InnovationModel, A: float, x0_lin: float, n0: int, nmax: int
) -> np.ndarray:
    """Dominating renewal sequence for the AR(1) survival probabilities.

    ``w[n] = 1`` for ``n < n0`` and ``w[n] = sum_{k=1}^n w[k-1] c_{n-k}(x0)`` afterwards.

    Args:
        model: Innovation model.
        A: Inverse of the contraction factor.
        x0_lin: Threshold on the linear scale.
        n0: Number of leading ones, typically :func:`upper_bound_start`.
        nmax: Last index.

    Returns:
        Array ``w[0..nmax]``.
    """
    if n0 < 1 or nmax < 0:
        raise ValueError(f"Expected n0 >= 1 and nmax >= 0 but got {n0}, {nmax}.")
    weights = np.asarray(cj(model, A, x0_lin, np.arange(nmax + 1)))
    w = np.ones(nmax + 1)
    for n in range(n0, nmax + 1):
        w[n] = np.dot(w[:n], weights[n - 1 :: -1])
    return w
