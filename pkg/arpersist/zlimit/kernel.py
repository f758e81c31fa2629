import numpy as np

from arpersist.innovations.distributions import ArrayLike

from .models import ZParams


def _finish(values: np.ndarray) -> ArrayLike:
    return float(values) if np.ndim(values) == 0 else values


def z_atom_mass(params: ZParams, x: float, t: float) -> float:
    """Mass ``((x - t) / x)^c`` of the event that ``Z`` drifts down without jumping."""
    if t <= 0:
        raise ValueError(f"Expected t > 0 but got {t}.")
    return ((x - t) / x) ** params.c if t < x else 0.0


def z_transition_cdf(params: ZParams, x: float, t: float, y: ArrayLike) -> ArrayLike:
    """Transition function ``P_x(Z_t <= y)``.

    Zero below ``(x - t)^+`` and ``(y / (y + t))^c`` from there on; for ``t < x`` the jump at
    ``x - t`` is the atom of paths without a record.
    """
    if x < 0 or t <= 0:
        raise ValueError(f"Expected x >= 0 and t > 0 but got x={x}, t={t}.")
    yy = np.asarray(y, dtype=float)
    floor = max(x - t, 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        inner = np.where(np.isinf(yy), 1.0, (np.maximum(yy, 0.0) / (yy + t)) ** params.c)
    return _finish(np.where(yy < floor, 0.0, inner))


def z_transition_pdf(params: ZParams, x: float, t: float, y: ArrayLike) -> ArrayLike:
    """Density ``c t y^(c-1) / (t + y)^(c+1)`` of the absolutely continuous part."""
    if t <= 0:
        raise ValueError(f"Expected t > 0 but got {t}.")
    yy = np.asarray(y, dtype=float)
    c = params.c
    with np.errstate(invalid="ignore", divide="ignore"):
        dens = c * t * np.maximum(yy, 0.0) ** (c - 1.0) / (t + yy) ** (c + 1.0)
    return _finish(np.where(yy <= max(x - t, 0.0), 0.0, dens))


def z_step_sample(params: ZParams, x: ArrayLike, t: float, u: ArrayLike) -> ArrayLike:
    """Exact inverse-transform draw of ``Z_t`` under ``P_x`` from the uniform(s) ``u``.

    Below the atom mass the path drifts to ``x - t``; otherwise ``y = t s / (1 - s)`` with
    ``s = u^(1/c)``.
    """
    if t <= 0:
        raise ValueError(f"Expected t > 0 but got {t}.")
    xx = np.asarray(x, dtype=float)
    uu = np.asarray(u, dtype=float)
    safe_x = np.where(xx > 0, xx, 1.0)
    atom = np.where(xx > t, ((xx - t) / safe_x) ** params.c, 0.0)
    s = uu ** (1.0 / params.c)
    with np.errstate(divide="ignore"):
        jumped = t * s / (1.0 - s)
    return _finish(np.where((xx > t) & (uu <= atom), xx - t, jumped))


def sample_z_path_marginal(
    params: ZParams,
    x: float,
    t: float,
    steps: int,
    rng: np.random.Generator,
    size: int,
) -> np.ndarray:
    """Draws of ``Z_t`` under ``P_x`` built from ``steps`` kernel steps of length ``t / steps``."""
    if steps < 1:
        raise ValueError(f"Expected positive steps but got {steps}.")
    state = np.full(size, float(x))
    for _ in range(steps):
        state = np.atleast_1d(z_step_sample(params, state, t / steps, rng.random(size)))
    return state
