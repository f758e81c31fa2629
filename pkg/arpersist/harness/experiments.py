import math
from collections.abc import Callable
from dataclasses import replace

import numpy as np
from loguru import logger
from scipy import special
from typing_extensions import Self

from arpersist.chains import (
    ChainKind,
    SimConfig,
    block_generator,
    check_return_hypothesis,
    estimate_expected_T,
    estimate_tail,
    sample_scaled_marginal,
)
from arpersist.errors import ArpersistError, HypothesisError
from arpersist.exact_r import (
    cdf_grid,
    cell_index,
    expected_T_exact,
    harmonic_G,
    harmonic_table,
    kappa,
    tail_at,
    tail_table,
    u0_integral,
)
from arpersist.innovations import DiscreteInteger, InnovationModel, LogTail, ShiftedPareto, Weibull
from arpersist.innovations import tail as innovation_tail
from arpersist.zlimit import (
    ZParams,
    harmonic_identity_residual,
    reg_inc_beta,
    sample_exp_functional,
    sample_t0,
    t0_small_start_asymptote,
    t0_tail,
)

from .models import ExperimentName, ExperimentSpec, MetricRow, ResultRecord
from .oracle import brute_force_tail
from .stats import EmpiricalCdf, ks_critical, ks_distance, ratio_trend

EXPECTED_T_HORIZON = 100_000
UNCONDITIONED_KS_TOL = 0.02
UNCONDITIONED_REPLICATES = 200_000
MIN_ACCEPTED_DRAWS = 10_000
SANDWICH_ENVELOPE = 50.0
ORACLE_MAX_N = 12
ORACLE_MAX_K = 5
ORACLE_SUM_TERMS = 2000
ORACLE_EXACT_TOL = 1e-12
ORACLE_SUM_TOL = 1e-8
ZLAW_SYMMETRY_TOL = 1e-9
ZLAW_ASYMPTOTE_TOL = 5e-3
ZLAW_IDENTITY_TOL = 1e-5
ZLAW_IDENTITY_CASES = ((1.0, 2.0), (0.5, 3.0), (2.0, 10.0), (0.1, 0.7))

CANONICAL_DISCRETE = DiscreteInteger((0.5, 0.2, 0.1, 0.1, 0.1))

DEFAULTS: dict[ExperimentName, dict] = {
    ExperimentName.THM2: dict(model=LogTail(0.5), x0=1.0, start=2.0, n_grid=(100, 1000, 10000)),
    ExperimentName.THM4: dict(
        model=ShiftedPareto(2.0, 1.0), x0=1.0, start=2.0, n_grid=(100, 1000, 10000)
    ),
    ExperimentName.THM5: dict(
        model=Weibull(0.5, 1.0),
        x0=2.0,
        start=3.0,
        n_grid=(50, 100, 150),
        replicates=1_000_000,
        tol=math.inf,
    ),
    ExperimentName.ZLAW: dict(
        model=LogTail(0.5), x0=0.0, start=1.0, n_grid=(1,), replicates=100_000, tol=0.01
    ),
    ExperimentName.FUNC_LIMIT: dict(
        model=LogTail(0.5), x0=1.0, start=2.0, n_grid=(100, 1000), replicates=2_000_000, tol=0.05
    ),
    ExperimentName.SANDWICH: dict(
        model=LogTail(0.5), x0=2.0, start=3.0, n_grid=(10, 100, 1000), replicates=100_000,
        tol=SANDWICH_ENVELOPE,
    ),
    ExperimentName.ORACLE: dict(
        model=CANONICAL_DISCRETE, x0=0.5, start=1.2, n_grid=(1, 2, 5, 10), replicates=100_000,
        tol=ORACLE_EXACT_TOL,
    ),
}


def _log_tail_index(model: InnovationModel) -> float:
    if not isinstance(model, LogTail) or not 0 < model.c < 1:
        raise HypothesisError(f"Expected a log-tail model with 0 < c < 1 but got {model!r}.")
    return model.c


def _trend_rows(
    criterion: str,
    spec: ExperimentSpec,
    observed: list[float],
    reference: list[float],
    std_errs: list[float] | None = None,
) -> list[MetricRow]:
    std_errs = std_errs or [0.0] * len(observed)
    pairs = [(n, o / r) for n, o, r in zip(spec.n_grid, observed, reference)]
    rel_errors = [s / o if o > 0 else math.inf for s, o in zip(std_errs, observed)]
    verdict = ratio_trend(pairs, spec.tol, rel_errors)
    logger.info(f"{criterion} ratios {[round(r, 4) for _, r in pairs]}: pass={verdict}")
    return [
        MetricRow.of(criterion, n, o, r, verdict, std_err=s)
        for n, o, r, s in zip(spec.n_grid, observed, reference, std_errs)
    ]


def _verify_thm2(spec: ExperimentSpec, threads: int | None) -> list[MetricRow]:
    c = _log_tail_index(spec.model)
    nmax = spec.n_grid[-1]
    grid = cdf_grid(spec.model, spec.x0, nmax)
    table = tail_table(grid, nmax)
    G = harmonic_table(grid, nmax).G
    k = cell_index(spec.x0, spec.start)
    scale = kappa(c) * harmonic_G(grid, spec.start)
    observed = [tail_at(table, n, k) for n in spec.n_grid]
    reference = [scale / G[cell_index(spec.x0, n)] for n in spec.n_grid]
    return _trend_rows("null-recurrent-tail", spec, observed, reference)


def _verify_thm4(spec: ExperimentSpec, threads: int | None) -> list[MetricRow]:
    nmax = spec.n_grid[-1]
    grid = cdf_grid(spec.model, spec.x0, nmax)
    table = tail_table(grid, nmax)
    mean = expected_T_exact(grid, spec.start)
    if not math.isfinite(mean):
        raise HypothesisError(f"Expected a finite-mean model but got {spec.model!r}.")
    k = cell_index(spec.x0, spec.start)
    observed = [tail_at(table, n, k) for n in spec.n_grid]
    reference = [mean * innovation_tail(spec.model, n) for n in spec.n_grid]
    return _trend_rows("exchange-subexponential-tail", spec, observed, reference)


def _sim_config(spec: ExperimentSpec, horizon: int) -> SimConfig:
    return SimConfig(
        A=spec.A,
        x0_log=spec.x0,
        start_log=spec.start,
        horizon_cap=horizon,
        master_seed=spec.seed,
        replicates=spec.replicates,
    )


def _verify_thm5(spec: ExperimentSpec, threads: int | None) -> list[MetricRow]:
    check_return_hypothesis(ChainKind.AR_ONE, spec.model, spec.A, spec.x0)
    config = _sim_config(spec, spec.n_grid[-1])
    tails = estimate_tail(ChainKind.AR_ONE, spec.model, config, list(spec.n_grid), threads)
    if any(est.p_hat == 0 for est in tails):
        raise HypothesisError("No replicate survived the largest n; raise the replicates.")
    mean = estimate_expected_T(
        ChainKind.AR_ONE, spec.model, replace(config, horizon_cap=EXPECTED_T_HORIZON), threads
    )
    observed, reference, std_errs = [], [], []
    for est in tails:
        ref = mean.mean * innovation_tail(spec.model, est.n)
        rel = math.hypot(est.std_err / est.p_hat, mean.std_err / mean.mean)
        observed.append(est.p_hat)
        reference.append(ref)
        std_errs.append(rel * est.p_hat)
    return _trend_rows("ar-subexponential-tail", spec, observed, reference, std_errs)


def _verify_zlaw(spec: ExperimentSpec, threads: int | None) -> list[MetricRow]:
    params = ZParams(_log_tail_index(spec.model))
    c, z = params.c, spec.start
    rows = []

    symmetric = t0_tail(params, 1.0, 2.0)
    reference = float(special.betainc(1.0 - c, c, 0.5))
    rows.append(
        MetricRow.of(
            "t0-tail-midpoint",
            2,
            symmetric,
            reference,
            abs(symmetric - reference) <= ZLAW_SYMMETRY_TOL,
        )
    )
    boundary = t0_tail(params, z, z)
    rows.append(MetricRow.of("t0-tail-boundary", 1, boundary, 1.0, boundary == 1.0))
    small = t0_tail(params, 1e-3, 1.0)
    asymptote = t0_small_start_asymptote(params, 1e-3, 1.0)
    rows.append(
        MetricRow.of(
            "t0-small-start",
            1000,
            small,
            asymptote,
            abs(small / asymptote - 1.0) <= ZLAW_ASYMPTOTE_TOL,
        )
    )

    def t0_cdf(s: np.ndarray) -> np.ndarray:
        return 1.0 - np.asarray(t0_tail(params, z, s))

    draws = sample_t0(params, z, block_generator(spec.seed, 0), size=spec.replicates)
    ks_beta = ks_distance(EmpiricalCdf(draws), t0_cdf)
    critical = ks_critical(spec.replicates)
    rows.append(
        MetricRow.of("ks-t0-sampler", spec.replicates, ks_beta, critical, ks_beta < critical)
    )

    rng = block_generator(spec.seed, 1)
    functional = np.array([sample_exp_functional(params, rng) for _ in range(spec.replicates)])
    ks_functional = ks_distance(EmpiricalCdf(z * functional), t0_cdf)
    rows.append(
        MetricRow.of(
            "ks-exp-functional", spec.replicates, ks_functional, spec.tol, ks_functional < spec.tol
        )
    )

    for case, (x, t) in enumerate(ZLAW_IDENTITY_CASES):
        residual = harmonic_identity_residual(params, x, t)
        rows.append(
            MetricRow.of(
                "harmonic-identity", case, residual, ZLAW_IDENTITY_TOL, residual < ZLAW_IDENTITY_TOL
            )
        )
    return rows


def _verify_func_limit(spec: ExperimentSpec, threads: int | None) -> list[MetricRow]:
    c = _log_tail_index(spec.model)
    config = _sim_config(spec, spec.n_grid[-1])
    rows = []
    distances = []
    for n in spec.n_grid:
        sample = sample_scaled_marginal(
            ChainKind.RANDOM_EXCHANGE, spec.model, config, 1.0, n, True, threads
        )
        accepted = sample.kept >= MIN_ACCEPTED_DRAWS
        rows.append(MetricRow.of("accepted-draws", n, sample.kept, MIN_ACCEPTED_DRAWS, accepted))
        ks = ks_distance(EmpiricalCdf(sample.values), lambda y: y / (1.0 + y))
        distances.append(ks)
        rows.append(MetricRow.of("ks-conditioned", n, ks, spec.tol, ks < spec.tol))
    decreasing = all(b < a for a, b in zip(distances, distances[1:]))
    rows.append(
        MetricRow.of(
            "ks-conditioned-trend", spec.n_grid[-1], distances[-1], distances[0], decreasing
        )
    )
    n = spec.n_grid[-1]
    free_config = replace(config, replicates=min(spec.replicates, UNCONDITIONED_REPLICATES))
    free = sample_scaled_marginal(
        ChainKind.RANDOM_EXCHANGE, spec.model, free_config, 1.0, n, False, threads
    )
    ks = ks_distance(EmpiricalCdf(free.values), lambda y: (y / (y + 1.0)) ** c)
    passed = ks < UNCONDITIONED_KS_TOL
    rows.append(MetricRow.of("ks-unconditioned", n, ks, UNCONDITIONED_KS_TOL, passed))
    return rows


def _verify_sandwich(spec: ExperimentSpec, threads: int | None) -> list[MetricRow]:
    _log_tail_index(spec.model)
    check_return_hypothesis(ChainKind.AR_ONE, spec.model, spec.A, spec.x0)
    config = _sim_config(spec, spec.n_grid[-1])
    tails = estimate_tail(ChainKind.AR_ONE, spec.model, config, list(spec.n_grid), threads)
    rows = []
    for est in tails:
        scale = u0_integral(spec.model, est.n) / u0_integral(spec.model, min(spec.start, est.n))
        observed = est.p_hat * scale
        inside = 1.0 / spec.tol <= observed <= spec.tol
        rows.append(
            MetricRow.of("sandwich-envelope", est.n, observed, 1.0, inside, est.std_err * scale)
        )
    return rows


def _verify_oracle(spec: ExperimentSpec, threads: int | None) -> list[MetricRow]:
    model = spec.model
    if not isinstance(model, DiscreteInteger):
        raise HypothesisError(f"Expected a discrete model but got {model!r}.")
    grid = cdf_grid(model, spec.x0, ORACLE_SUM_TERMS)
    table = tail_table(grid, ORACLE_SUM_TERMS)
    rows = []

    gap = max(
        abs(tail_at(table, n, k) - brute_force_tail(model, spec.x0, spec.x0 + k + 1, n))
        for n in range(ORACLE_MAX_N + 1)
        for k in range(ORACLE_MAX_K + 1)
    )
    rows.append(MetricRow.of("recursion-vs-dp", ORACLE_MAX_N, gap, spec.tol, gap <= spec.tol))

    for k in (0, 1):
        exact = expected_T_exact(grid, spec.x0 + k + 1)
        summed = math.fsum(tail_at(table, n, k) for n in range(ORACLE_SUM_TERMS + 1))
        rows.append(
            MetricRow.of(
                "expected-t-vs-tails", k, summed, exact, abs(summed - exact) <= ORACLE_SUM_TOL
            )
        )

    config = _sim_config(spec, spec.n_grid[-1])
    k = cell_index(spec.x0, spec.start)
    for est in estimate_tail(ChainKind.RANDOM_EXCHANGE, model, config, list(spec.n_grid), threads):
        exact = tail_at(table, est.n, k)
        sigma = math.sqrt(exact * (1.0 - exact) / spec.replicates)
        rows.append(
            MetricRow.of(
                "mc-vs-exact", est.n, est.p_hat, exact, abs(est.p_hat - exact) <= 3 * sigma,
                std_err=est.std_err,
            )
        )

    G = harmonic_table(grid, ORACLE_MAX_N + 1).G
    differences = np.max(np.abs(np.diff(G) - grid.products[1 : ORACLE_MAX_N + 2]))
    rows.append(
        MetricRow.of(
            "harmonic-differences", ORACLE_MAX_N, differences, spec.tol, differences <= spec.tol
        )
    )

    points = ((0.25, 0.5, 0.5), (0.1, 2.0, 3.0), (0.7, 0.3, 0.7), (0.5, 1.5, 0.5))
    symmetry = max(
        abs(reg_inc_beta(x, a, b) + reg_inc_beta(1.0 - x, b, a) - 1.0) for x, a, b in points
    )
    rows.append(
        MetricRow.of("beta-symmetry", len(points), symmetry, spec.tol, symmetry <= spec.tol)
    )
    arcsine = reg_inc_beta(0.25, 0.5, 0.5)
    rows.append(
        MetricRow.of("beta-arcsine", 1, arcsine, 1.0 / 3.0, abs(arcsine - 1.0 / 3.0) <= spec.tol)
    )
    return rows


RUNNERS: dict[ExperimentName, Callable[[ExperimentSpec, int | None], list[MetricRow]]] = {
    ExperimentName.THM2: _verify_thm2,
    ExperimentName.THM4: _verify_thm4,
    ExperimentName.THM5: _verify_thm5,
    ExperimentName.ZLAW: _verify_zlaw,
    ExperimentName.FUNC_LIMIT: _verify_func_limit,
    ExperimentName.SANDWICH: _verify_sandwich,
    ExperimentName.ORACLE: _verify_oracle,
}


def run_experiment(spec: ExperimentSpec, threads: int | None = None) -> ResultRecord:
    """Run a verification experiment.

    Numerical failures do not propagate: they become a failed row carrying the cause.

    Args:
        spec: Experiment parameters.
        threads: Worker count for Monte Carlo parts; does not change results.

    Returns:
        The record with one row per checked quantity.
    """
    logger.info(f"Start experiment {spec.name.value}")
    try:
        rows = RUNNERS[spec.name](spec, threads)
    except ArpersistError as e:
        logger.warning(f"Experiment {spec.name.value} failed: {e}")
        rows = [MetricRow.failed(spec.name.value, str(e))]
    record = ResultRecord(
        experiment=spec.name.value, params=spec.to_params(), rows=tuple(rows), seed=spec.seed
    )
    logger.info(f"Experiment {spec.name.value} finished: pass={record.passed}")
    return record


class Experiment:
    """Fluent builder of a verification experiment.

    Starts from the defaults of the named experiment; every setter validates and returns the
    builder, and :meth:`run` executes it.

    Example:
        >>> Experiment("oracle").set_replicates(10_000).set_seed(7).run().passed
        True
    """

    def __init__(self, name: ExperimentName | str) -> None:
        self._name = ExperimentName(name)
        self._params = dict(DEFAULTS[self._name])
        self._threads: int | None = None

    def set_model(self, model: InnovationModel) -> Self:
        self._params["model"] = model
        return self

    def set_x0(self, value: float) -> Self:
        self._params["x0"] = float(value)
        return self

    def set_A(self, value: float) -> Self:
        if value <= 1:
            raise ValueError(f"Expected A > 1 but got {value}.")
        self._params["A"] = float(value)
        return self

    def set_start(self, value: float) -> Self:
        self._params["start"] = float(value)
        return self

    def set_n_grid(self, values: list[int] | tuple[int, ...]) -> Self:
        if not values:
            raise ValueError("Expected a non-empty n_grid.")
        self._params["n_grid"] = tuple(int(v) for v in values)
        return self

    def set_replicates(self, value: int) -> Self:
        if value <= 0:
            raise ValueError(f"Expected positive integer but got {value}.")
        self._params["replicates"] = value
        return self

    def set_seed(self, value: int) -> Self:
        self._params["seed"] = value
        return self

    def set_tol(self, value: float) -> Self:
        self._params["tol"] = float(value)
        return self

    def set_threads(self, value: int | None) -> Self:
        """Set the worker count; it only affects speed."""
        if value is not None and value <= 0:
            raise ValueError(f"Expected positive integer but got {value}.")
        self._threads = value
        return self

    def spec(self) -> ExperimentSpec:
        return ExperimentSpec(name=self._name, **self._params)

    def run(self) -> ResultRecord:
        return run_experiment(self.spec(), self._threads)
