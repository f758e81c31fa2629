import math

import numpy as np
from loguru import logger
from scipy import special

from arpersist.errors import HypothesisError
from arpersist.innovations import (
    ChainClassification,
    DiscreteInteger,
    InnovationModel,
    LogTail,
    cdf,
    classify,
    mean_excess,
    mean_upper,
    tail,
)

from .integrals import u0_integral
from .models import CdfGrid, HarmonicTable, TailTable

PRODUCT_HEAD_TERMS = 1 << 16
HARMONICITY_CELLS = 64
RECURSION_LOG_EVERY = 2000


def cell_index(x0: float, x: float) -> int:
    """Index ``n`` of the cell ``(x0 + n, x0 + n + 1]`` containing ``x > x0``."""
    if not x > x0:
        raise ValueError(f"Expected x > x0 but got x={x}, x0={x0}.")
    return math.ceil(x - x0) - 1


def cdf_grid(model: InnovationModel, x0: float, kmax: int) -> CdfGrid:
    """Tabulate ``P(eta <= x0 + k)`` for ``k = 0..kmax``.

    Raises:
        HypothesisError: If ``P(eta <= x0) P(eta > x0) = 0``.
        ValueError: If ``kmax`` is negative.
    """
    if kmax < 0:
        raise ValueError(f"Expected kmax >= 0 but got {kmax}.")
    if cdf(model, x0) <= 0 or tail(model, x0) <= 0:
        raise HypothesisError(f"Expected P(eta <= x0) P(eta > x0) > 0 at x0={x0} for {model!r}.")
    levels = x0 + np.arange(kmax + 1, dtype=float)
    return CdfGrid(
        model=model, x0=x0, p=np.asarray(cdf(model, levels)), sf=np.asarray(tail(model, levels))
    )


def infinite_product(model: InnovationModel, x0: float) -> float:
    """Limit ``prod_{k>=0} P(eta <= x0 + k)``, the reciprocal of ``u(x0 + 1)``.

    The product is positive iff ``E eta^+`` is finite. The head is summed in log scale and
    the rest of ``sum -log(1 - F(x0 + k))`` is estimated by Euler-Maclaurin against the
    integrated tail.
    """
    if not math.isfinite(mean_upper(model)):
        return 0.0
    if isinstance(model, DiscreteInteger):
        terms = max(model.support_max - math.floor(x0) + 1, 1)
        return float(np.prod(cdf(model, x0 + np.arange(terms, dtype=float))))
    terms = PRODUCT_HEAD_TERMS
    with np.errstate(divide="ignore"):
        log_head = float(np.sum(np.log1p(-np.asarray(tail(model, x0 + np.arange(terms))))))
    f_prev, f_at, f_next = (tail(model, x0 + terms + d) for d in (-1.0, 0.0, 1.0))
    remainder = mean_excess(model, x0 + terms) + f_at / 2.0 - (f_next - f_prev) / 24.0
    logger.debug(f"Infinite product at x0={x0}: head {log_head}, remainder {remainder}")
    return math.exp(log_head - remainder)


def harmonic_table(grid: CdfGrid, nmax: int) -> HarmonicTable:
    """Harmonic function ``G[n] = 1 + sum_{j=1}^n prod_{k<j} p[k]`` for ``n = 0..nmax``.

    Raises:
        ValueError: If the grid does not cover ``nmax``.
    """
    if not 0 <= nmax <= grid.kmax + 1:
        raise ValueError(f"Expected 0 <= nmax <= {grid.kmax + 1} but got {nmax}.")
    products = grid.products[1 : nmax + 1]
    return HarmonicTable(grid=grid, G=np.concatenate(([1.0], 1.0 + np.cumsum(products))))


def harmonic_G(grid: CdfGrid, x: float) -> float:
    """Harmonic function of the random exchange chain killed at ``(-inf, x0]``.

    ``G`` is piecewise constant on the cells ``(x0 + n, x0 + n + 1]`` with ``G = 1`` on the
    first cell. It is a non-trivial harmonic function iff ``E eta^+ = inf``.

    Args:
        grid: Lattice distribution function.
        x: Point above ``x0``.

    Returns:
        ``G(x)``.

    Raises:
        ValueError: If ``x <= x0`` or the grid is too short.
    """
    n = cell_index(grid.x0, x)
    if n > grid.kmax + 1:
        raise ValueError(f"Grid with kmax={grid.kmax} does not cover x={x}.")
    return float(1.0 + np.sum(grid.products[1 : n + 1]))


def check_harmonicity(
    model: InnovationModel, x0: float, x: float, cells: int = HARMONICITY_CELLS
) -> float:
    """Residual ``G(x) - E_x[G(R_1); T > 1]`` of the one-step harmonic equation.

    The expectation is exact: ``G`` is constant on cells, so cell probabilities are read off
    the distribution function for ``cells`` cells past ``x`` and the remaining cells are
    summed in closed form by telescoping ``P(eta > x0 + m) prod_{k<m} p[k]``.

    Args:
        model: Innovation model.
        x0: Killing threshold.
        x: Point above ``x0``.
        cells: Number of cells summed explicitly beyond ``x``.

    Returns:
        The residual, zero up to rounding for infinite-mean models.
    """
    n = cell_index(x0, x)
    last = n + cells
    grid = cdf_grid(model, x0, last + 1)
    G = harmonic_table(grid, last + 1).G
    products, sf = grid.products, grid.sf

    stay = G[n - 1] * cdf(model, x - 1.0) if n >= 1 else 0.0
    first = n - 1 if n >= 1 else 0
    cell_mass = sf[first:last] - sf[first + 1 : last + 1]
    if n >= 1:
        cell_mass[0] = tail(model, x - 1.0) - sf[n]
    jump = float(np.dot(G[first:last], cell_mass))
    jump += G[last] * sf[last] + products[last + 1] - infinite_product(model, x0)
    residual = G[n] - stay - jump
    logger.debug(f"Harmonicity residual at x={x}: {residual}")
    return float(residual)


def recurrence_partial_sums(grid: CdfGrid, jmax: int) -> np.ndarray:
    """Partial sums ``S[J] = sum_{j=1}^J prod_{k<j} p[k]`` for ``J = 0..jmax``.

    The series diverges iff the chain is recurrent.
    """
    if not 0 <= jmax <= grid.kmax + 1:
        raise ValueError(f"Expected 0 <= jmax <= {grid.kmax + 1} but got {jmax}.")
    return np.concatenate(([0.0], np.cumsum(grid.products[1 : jmax + 1])))


def _require_transient(grid: CdfGrid) -> LogTail:
    if classify(grid.model) is not ChainClassification.TRANSIENT:
        raise HypothesisError(
            f"The return series diverges for the recurrent model {grid.model!r}."
        )
    return grid.model


def _log_tail_series_rest(model: LogTail, x0: float, start: int) -> float:
    # products are Gamma ratios for log-tails: sum_{j>=J} Gamma(a+j)/Gamma(b+j) is closed
    a, b = x0, x0 + model.c
    return math.exp(
        special.gammaln(b) - special.gammaln(a) + special.gammaln(a + start)
        - special.gammaln(b + start - 1)
    ) / (model.c - 1.0)


def _return_series_total(grid: CdfGrid) -> float:
    model = _require_transient(grid)
    partial = recurrence_partial_sums(grid, grid.kmax + 1)[-1]
    return 1.0 + partial + _log_tail_series_rest(model, grid.x0, grid.kmax + 2)


def transient_return_prob(grid: CdfGrid, x: float) -> float:
    """Probability ``P_x(T = inf)`` that the transient chain never returns below ``x0``.

    Equals ``(1 + sum_{1 <= j < x - x0} prod_{k<j} p[k]) / (1 + sum_{j>=1} prod_{k<j} p[k])``.

    Raises:
        HypothesisError: If the chain is recurrent.
    """
    total = _return_series_total(grid)
    return harmonic_G(grid, x) / total


def karamata_prefactor(grid: CdfGrid, j: int) -> float:
    """Slowly varying factor ``j^c prod_{k<j} p[k]`` of the log-tail products."""
    if not isinstance(grid.model, LogTail):
        raise HypothesisError(f"Expected a log-tail model but got {grid.model!r}.")
    if not 1 <= j <= grid.kmax + 1:
        raise ValueError(f"Expected 1 <= j <= {grid.kmax + 1} but got {j}.")
    return float(j**grid.model.c * grid.products[j])


def transient_asymptote(grid: CdfGrid, x: float) -> float:
    """Asymptote ``L(y) / ((c - 1) y^(c-1))`` of ``P_x(T < inf)``, ``y = x - x0``.

    The tail sum of the products is divided by the full series, so the asymptote carries the
    same normalization as :func:`transient_return_prob`.
    """
    model = _require_transient(grid)
    j = cell_index(grid.x0, x) + 1
    prefactor = karamata_prefactor(grid, j)
    return prefactor / ((model.c - 1.0) * j ** (model.c - 1.0)) / _return_series_total(grid)


def expected_T_exact(grid: CdfGrid, x: float) -> float:
    """Expected return time ``E_x[T]`` below ``x0`` of the random exchange chain.

    ``E_x T = G(x) / prod_{k>=0} P(eta <= x0 + k)``; infinite when ``E eta^+ = inf``.
    """
    product = infinite_product(grid.model, grid.x0)
    G = harmonic_G(grid, x)
    if product == 0.0:
        return math.inf
    return G / product


def tail_table(grid: CdfGrid, nmax: int) -> TailTable:
    """Exact tail ``v[n] = P_{x0+1}(T > n)`` of the random exchange return time.

    ``v[n] = P(eta > x0 + n - 1) + v[n-1] P(x0 < eta <= x0 + n - 1)
    + sum_{m=1}^{n-2} v[n-m-1] P(x0 + m < eta <= x0 + n - 1) prod_{j<m} p[j]``.

    Args:
        grid: Lattice distribution function with ``kmax >= nmax``.
        nmax: Last index.

    Returns:
        The table.

    Raises:
        ValueError: If ``nmax < 1`` or the grid is too short.
    """
    if nmax < 1:
        raise ValueError(f"Expected nmax >= 1 but got {nmax}.")
    if grid.kmax < nmax:
        raise ValueError(f"Grid with kmax={grid.kmax} is too short for nmax={nmax}.")
    products, sf = grid.products, grid.sf
    v = np.empty(nmax + 1)
    v[0] = 1.0
    for n in range(1, nmax + 1):
        last_sf = sf[n - 1]
        value = last_sf + v[n - 1] * (sf[0] - last_sf)
        if n >= 3:
            weights = products[1 : n - 1] * (sf[1 : n - 1] - last_sf)
            value += np.dot(v[n - 2 : 0 : -1], weights)
        v[n] = value
        if n % RECURSION_LOG_EVERY == 0:
            logger.info(f"Tail recursion at n={n} of {nmax}")
    d = products[: nmax + 1] * sf[: nmax + 1]
    c_seq = np.concatenate(([tail(grid.model, grid.x0 - 1.0)], sf[:nmax]))
    return TailTable(grid=grid, v=v, d=d, c_seq=c_seq)


def tail_at(table: TailTable, n: int, k: int) -> float:
    """``v(n, k) = P_{x0+k+1}(T > n) = v[n] + sum_{m=1}^k v[n-m] prod_{j<m} p[j]``.

    Equals 1 for ``n <= k``.

    Raises:
        ValueError: If ``k < 0`` or ``n`` exceeds the table.
    """
    if k < 0 or n < 0:
        raise ValueError(f"Expected non-negative n and k but got n={n}, k={k}.")
    if n <= k:
        return 1.0
    if n > table.nmax:
        raise ValueError(f"Expected n <= {table.nmax} but got {n}.")
    m = np.arange(1, k + 1)
    return float(table.v[n] + np.dot(table.v[n - m], table.grid.products[m]))


def harmonic_growth_ratio(table: HarmonicTable, n: int) -> float:
    """Ratio ``G(n) / U_0(n)``, convergent for log-tails with ``c < 1``."""
    return float(table.G[cell_index(table.grid.x0, n)] / u0_integral(table.grid.model, n))
