import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TypeVar

import numpy as np
from loguru import logger
from scipy import stats

from arpersist.errors import CensoredSampleError, EmptySampleError, HypothesisError
from arpersist.exact_r import u0_integral
from arpersist.innovations import (
    ChainClassification,
    InnovationModel,
    cdf,
    classify,
    sample,
)

from .models import (
    Censored,
    ChainKind,
    Hit,
    MarginalSample,
    MeanEstimate,
    RecurrenceOutcome,
    SimConfig,
    TailEstimate,
    VEstimate,
)
from .steps import step_ar_log, step_random_exchange
from .streams import block_generator, block_sizes

NOT_HIT = 0
CI_LEVEL = 0.95

BlockValue = TypeVar("BlockValue")


@dataclass(frozen=True, eq=False)
class _BlockPaths:
    # hit[i] is the return step of replicate i or NOT_HIT
    hit: np.ndarray
    recorded: np.ndarray | None


def _step(kind: ChainKind, state: np.ndarray, eta: np.ndarray, A: float) -> np.ndarray:
    if kind is ChainKind.AR_ONE:
        return step_ar_log(state, eta, A)
    return step_random_exchange(state, eta)


def _simulate_block(
    kind: ChainKind,
    model: InnovationModel,
    config: SimConfig,
    rng: np.random.Generator,
    size: int,
    horizon: int,
    record_at: int | None = None,
    kill: bool = True,
) -> _BlockPaths:
    state = np.full(size, config.start_log, dtype=float)
    hit = np.full(size, NOT_HIT, dtype=np.int64)
    recorded = None
    active = np.arange(size)
    for n in range(1, horizon + 1):
        if active.size == 0:
            break
        eta = sample(model, rng, active.size)
        moved = np.atleast_1d(_step(kind, state[active], eta, config.A))
        state[active] = moved
        if kill:
            returned = moved <= config.x0_log
            hit[active[returned]] = n
            active = active[~returned]
        if n == record_at:
            recorded = state.copy()
    if record_at is not None and recorded is None:
        recorded = state.copy()
    return _BlockPaths(hit=hit, recorded=recorded)


def _run_blocks(
    config: SimConfig,
    block_fn: Callable[[np.random.Generator, int], BlockValue],
    threads: int | None,
) -> list[BlockValue]:
    sizes = block_sizes(config.replicates)
    logger.info(f"Running {config.replicates} replicates in {len(sizes)} blocks")

    def run(block: int) -> BlockValue:
        return block_fn(block_generator(config.master_seed, block), sizes[block])

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, range(len(sizes))))


def return_level(kind: ChainKind, A: float, x0_log: float) -> float:
    """Largest log-innovation that moves a state just above ``x0`` to at most ``x0``.

    For the AR(1) chain ``A^x0 / A + A^eta <= A^x0`` needs ``eta <= x0 + log_A(1 - 1/A)``;
    the other chains return iff ``eta <= x0``.
    """
    if kind is ChainKind.AR_ONE:
        return x0_log + math.log1p(-1.0 / A) / math.log(A)
    return x0_log


def check_return_hypothesis(
    kind: ChainKind, model: InnovationModel, A: float, x0_log: float
) -> None:
    """Require a positive one-step return probability from just above the threshold.

    Raises:
        HypothesisError: If no innovation can bring the chain back below ``x0``.
    """
    level = return_level(kind, A, x0_log)
    if not cdf(model, level) > 0:
        raise HypothesisError(
            f"Expected P(eta <= {level:.6g}) > 0 so that the {kind.value} chain can return "
            f"below x0={x0_log} but got {model!r}."
        )


def simulate_recurrence_time(
    kind: ChainKind, model: InnovationModel, config: SimConfig, rng: np.random.Generator
) -> RecurrenceOutcome:
    """Simulate one path until it returns to ``(-inf, x0]`` or the horizon cap is reached.

    Args:
        kind: Chain to simulate.
        model: Innovation model.
        config: Start, threshold and horizon; AR(1) and max-AR levels are on the log scale.
        rng: Caller-owned stream.

    Returns:
        ``Hit(T)`` for the first ``T >= 1`` with state at most ``x0``, else ``Censored(cap)``.
    """
    state = config.start_log
    for n in range(1, config.horizon_cap + 1):
        state = _step(kind, state, sample(model, rng), config.A)
        if state <= config.x0_log:
            return Hit(n)
    return Censored(config.horizon_cap)


def estimate_tail(
    kind: ChainKind,
    model: InnovationModel,
    config: SimConfig,
    n_grid: list[int],
    threads: int | None = None,
) -> list[TailEstimate]:
    """Monte Carlo estimates of ``P_x(T > n)`` along ``n_grid``.

    Survival is counted as integers per block, so estimates do not depend on the number of
    threads and are non-increasing along the grid.

    Args:
        kind: Chain to simulate.
        model: Innovation model.
        config: Simulation setup; ``max(n_grid) <= horizon_cap``.
        n_grid: Increasing non-negative steps.
        threads: Worker count, ``None`` for the executor default.

    Returns:
        One estimate per grid point.
    """
    if not n_grid:
        raise ValueError("Expected a non-empty n_grid.")
    if any(a >= b for a, b in zip(n_grid, n_grid[1:])) or n_grid[0] < 0:
        raise ValueError(f"Expected increasing non-negative n_grid but got {n_grid}.")
    if n_grid[-1] > config.horizon_cap:
        raise ValueError(f"Expected max(n_grid) <= {config.horizon_cap} but got {n_grid[-1]}.")
    grid = np.asarray(n_grid, dtype=np.int64)

    def survivors(rng: np.random.Generator, size: int) -> np.ndarray:
        hit = _simulate_block(kind, model, config, rng, size, int(grid[-1])).hit
        alive = np.where(hit == NOT_HIT, np.iinfo(np.int64).max, hit)
        return (alive[:, None] > grid[None, :]).sum(axis=0)

    counts = np.sum(_run_blocks(config, survivors, threads), axis=0)
    out = []
    for n, count in zip(n_grid, counts):
        p_hat = int(count) / config.replicates
        out.append(
            TailEstimate(
                n=n,
                p_hat=p_hat,
                std_err=math.sqrt(p_hat * (1.0 - p_hat) / config.replicates),
                replicates=config.replicates,
            )
        )
    return out


def estimate_expected_T(
    kind: ChainKind,
    model: InnovationModel,
    config: SimConfig,
    threads: int | None = None,
) -> MeanEstimate:
    """Sample mean of the return time with a normal confidence interval.

    Raises:
        HypothesisError: If the chain is not positive recurrent or cannot return below ``x0``.
        CensoredSampleError: If any replicate reaches the horizon cap.
    """
    if classify(model) is not ChainClassification.POSITIVE_RECURRENT:
        raise HypothesisError(f"Expected a positive recurrent model but got {model!r}.")
    check_return_hypothesis(kind, model, config.A, config.x0_log)

    def hits(rng: np.random.Generator, size: int) -> np.ndarray:
        return _simulate_block(kind, model, config, rng, size, config.horizon_cap).hit

    times = np.concatenate(_run_blocks(config, hits, threads))
    censored = int(np.sum(times == NOT_HIT))
    if censored:
        raise CensoredSampleError(censored, config.horizon_cap)
    mean = float(times.mean())
    std_err = float(times.std(ddof=1) / math.sqrt(times.size)) if times.size > 1 else 0.0
    half = stats.norm.ppf(0.5 + CI_LEVEL / 2.0) * std_err
    logger.info(f"Mean return time {mean} +- {std_err} over {times.size} replicates")
    return MeanEstimate(
        mean=mean,
        std_err=std_err,
        ci_low=mean - half,
        ci_high=mean + half,
        replicates=int(times.size),
    )


def sample_scaled_marginal(
    kind: ChainKind,
    model: InnovationModel,
    config: SimConfig,
    t: float,
    n: int,
    condition_on_survival: bool,
    threads: int | None = None,
) -> MarginalSample:
    """Replicates of ``state_{floor(n t)} / n``.

    Without conditioning the chain runs freely. With conditioning each replicate is killed
    at its return below ``x0`` and only replicates with ``T > n`` are kept.

    Args:
        kind: Chain to simulate.
        model: Innovation model.
        config: Simulation setup; ``horizon_cap`` is not used.
        t: Time fraction in ``(0, 1]``.
        n: Scaling index.
        condition_on_survival: Keep only replicates surviving ``n`` steps.
        threads: Worker count.

    Returns:
        The kept values and counts.

    Raises:
        EmptySampleError: If conditioning rejects every replicate.
    """
    if not 0 < t <= 1:
        raise ValueError(f"Expected 0 < t <= 1 but got {t}.")
    steps = math.floor(n * t)
    if steps < 1:
        raise ValueError(f"Expected floor(n t) >= 1 but got n={n}, t={t}.")
    horizon = n if condition_on_survival else steps

    def scaled(rng: np.random.Generator, size: int) -> np.ndarray:
        paths = _simulate_block(
            kind, model, config, rng, size, horizon, record_at=steps, kill=condition_on_survival
        )
        values = paths.recorded / n
        return values[paths.hit == NOT_HIT] if condition_on_survival else values

    values = np.concatenate(_run_blocks(config, scaled, threads))
    if values.size == 0:
        raise EmptySampleError(f"No replicate out of {config.replicates} survived {n} steps.")
    logger.info(f"Kept {values.size} of {config.replicates} replicates")
    return MarginalSample(values=values, kept=int(values.size), replicates=config.replicates)


def estimate_V(
    model: InnovationModel,
    A: float,
    x0_log: float,
    x_log: float,
    n: int,
    replicates: int,
    master_seed: int,
    threads: int | None = None,
) -> VEstimate:
    """Monte Carlo estimate of ``E_x[U_0(log_A X_n); T > n]`` for the AR(1) chain.

    Raises:
        ValueError: If ``x_log <= x0_log``.
    """
    if not x_log > x0_log:
        raise ValueError(f"Expected x_log > x0_log but got {x_log}, {x0_log}.")
    config = SimConfig(
        A=A,
        x0_log=x0_log,
        start_log=x_log,
        horizon_cap=n,
        master_seed=master_seed,
        replicates=replicates,
    )

    def weighted(rng: np.random.Generator, size: int) -> np.ndarray:
        paths = _simulate_block(ChainKind.AR_ONE, model, config, rng, size, n, record_at=n)
        return np.where(paths.hit == NOT_HIT, u0_integral(model, paths.recorded), 0.0)

    values = np.concatenate(_run_blocks(config, weighted, threads))
    std_err = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    return VEstimate(value=float(values.mean()), std_err=std_err, replicates=replicates)
