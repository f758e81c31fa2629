import math

import numpy as np
import pytest
from scipy import stats

from arpersist.errors import HypothesisError
from arpersist.innovations import (
    ChainClassification,
    DiscreteInteger,
    LogNormalTail,
    LogTail,
    ShiftedPareto,
    Weibull,
    cdf,
    classify,
    format_model,
    load_discrete,
    log_insens_ratio,
    log_tail_d,
    mean_excess,
    mean_upper,
    parse_model,
    quantile,
    sample,
    sstar_ratio,
    tail,
)


def test_log_tail_closed_forms(log_tail_half):
    assert tail(log_tail_half, 1.0) == pytest.approx(1.0 / 3.0, rel=1e-15)
    assert cdf(log_tail_half, 1.0) == pytest.approx(2.0 / 3.0, rel=1e-15)
    assert tail(log_tail_half, -2.0) == 1.0
    assert quantile(log_tail_half, 0.5) == pytest.approx(0.5)
    assert math.isinf(mean_upper(log_tail_half))


def test_tail_is_vectorized(pareto):
    y = np.array([-1.0, 0.0, 1.0, 3.0])
    np.testing.assert_allclose(tail(pareto, y), [1.0, 1.0, 0.25, 1.0 / 16.0])
    np.testing.assert_allclose(cdf(pareto, y) + tail(pareto, y), np.ones(4))


def test_mean_excess(pareto, weibull):
    assert mean_upper(pareto) == pytest.approx(1.0)
    assert mean_excess(pareto, 3.0) == pytest.approx(0.25)
    assert mean_upper(weibull) == pytest.approx(2.0)
    assert mean_excess(weibull, -1.0) == pytest.approx(3.0)


def test_mean_excess_lognormal():
    model = LogNormalTail(0.0, 1.0)
    assert mean_upper(model) == pytest.approx(math.exp(0.5))
    assert mean_excess(model, 2.0) < mean_upper(model)


CONTINUOUS_MODELS = [
    LogTail(0.5),
    ShiftedPareto(2.0, 1.0),
    Weibull(0.5, 2.0),
    LogNormalTail(0.5, 1.0),
]


@pytest.mark.parametrize("model", CONTINUOUS_MODELS)
def test_quantile_inverts_cdf(model):
    u = np.random.default_rng(17).uniform(1e-6, 1.0 - 1e-6, size=1000)
    np.testing.assert_allclose(cdf(model, quantile(model, u)), u, rtol=1e-9, atol=1e-12)


def test_discrete_quantile_is_generalized_inverse(canonical_discrete):
    u = np.random.default_rng(17).uniform(1e-6, 1.0 - 1e-6, size=1000)
    q = quantile(canonical_discrete, u)
    assert np.all(cdf(canonical_discrete, q) >= u)
    # q is the smallest support point reaching u
    assert np.all((q == 0) | (cdf(canonical_discrete, q - 1.0) < u))


@pytest.mark.parametrize("model", [*CONTINUOUS_MODELS, Weibull(0.5, 1.0)])
def test_sample_matches_cdf(model):
    draws = sample(model, np.random.default_rng(2024), size=100_000)
    assert stats.kstest(draws, lambda y: cdf(model, y)).statistic < 0.0136


def test_discrete_sample_frequencies(canonical_discrete):
    n = 100_000
    draws = sample(canonical_discrete, np.random.default_rng(2024), size=n)
    counts = np.bincount(draws.astype(int), minlength=5) / n
    probs = np.asarray(canonical_discrete.probs)
    assert np.all(np.abs(counts - probs) <= 5 * np.sqrt(probs * (1 - probs) / n))


def test_quantile_rejects_levels(log_tail_half):
    with pytest.raises(ValueError):
        quantile(log_tail_half, 1.0)
    with pytest.raises(ValueError):
        quantile(log_tail_half, np.array([0.5, 0.0]))


def test_discrete_model(canonical_discrete):
    assert canonical_discrete.support_max == 4
    assert cdf(canonical_discrete, 0.5) == pytest.approx(0.5)
    assert tail(canonical_discrete, 1.5) == pytest.approx(0.3)
    assert tail(canonical_discrete, 4.0) == 0.0
    assert quantile(canonical_discrete, 0.55) == 1.0
    assert mean_upper(canonical_discrete) == pytest.approx(1.1)
    assert DiscreteInteger.point_mass(2).probs == (0.0, 0.0, 1.0)


def test_discrete_rejects_bad_sum():
    with pytest.raises(ValueError):
        DiscreteInteger((0.5, 0.4))
    with pytest.raises(ValueError):
        DiscreteInteger((1.5, -0.5))


def test_sample_is_reproducible(weibull):
    a = sample(weibull, np.random.default_rng(42), size=100)
    b = sample(weibull, np.random.default_rng(42), size=100)
    np.testing.assert_array_equal(a, b)
    assert np.all(a >= 0)
    single = sample(weibull, np.random.default_rng(42))
    assert isinstance(single, float)
    assert single == a[0]


def test_classify(log_tail_half, log_tail_transient, pareto, canonical_discrete):
    assert classify(log_tail_half) is ChainClassification.NULL_RECURRENT
    assert classify(log_tail_transient) is ChainClassification.TRANSIENT
    assert classify(LogTail(1.0)) is ChainClassification.CRITICAL_UNRESOLVED
    assert classify(pareto) is ChainClassification.POSITIVE_RECURRENT
    assert classify(canonical_discrete) is ChainClassification.POSITIVE_RECURRENT


def test_log_tail_d(log_tail_half):
    assert log_tail_d(log_tail_half, 2.0) == pytest.approx(0.5 * math.log(2.0))
    with pytest.raises(ValueError):
        log_tail_d(log_tail_half, 1.0)


def test_sstar_ratio_tends_to_twice_the_mean(pareto):
    assert sstar_ratio(pareto, 1000.0) == pytest.approx(2.0, rel=0.05)
    assert sstar_ratio(pareto, 0.0) == 0.0


def test_sstar_ratio_needs_finite_mean(log_tail_half):
    with pytest.raises(HypothesisError):
        sstar_ratio(log_tail_half, 10.0)


def test_log_insensitivity(log_tail_half, weibull, canonical_discrete):
    assert log_insens_ratio(log_tail_half, 1e6) == pytest.approx(1.0, abs=1e-3)
    assert log_insens_ratio(weibull, 100.0) > 1.0
    near, far = log_insens_ratio(weibull, 1e3), log_insens_ratio(weibull, 1e6)
    assert math.isfinite(far)
    assert abs(far - 1.0) < abs(near - 1.0)
    # exp(log(x) / (2 sqrt(x))) to first order
    assert far == pytest.approx(math.exp(math.log(1e6) / 2000.0), rel=1e-4)
    with pytest.raises(HypothesisError):
        log_insens_ratio(canonical_discrete, 10.0)


def test_sstar_ratio_weibull_trend(weibull):
    near, far = sstar_ratio(weibull, 100.0), sstar_ratio(weibull, 400.0)
    assert abs(far - 4.0) < abs(near - 4.0)


@pytest.mark.parametrize(
    "spec,expected",
    [
        ("log-tail:c=0.5", LogTail(0.5)),
        ("pareto:alpha=2,scale=1", ShiftedPareto(2.0, 1.0)),
        ("weibull:beta=0.5,scale=1", Weibull(0.5, 1.0)),
        ("lognormal:mu=0,sigma=1", LogNormalTail(0.0, 1.0)),
    ],
)
def test_parse_model(spec, expected):
    assert parse_model(spec) == expected
    assert parse_model(format_model(expected)) == expected


def test_parse_discrete(canonical_file, canonical_discrete):
    model = parse_model(f"discrete:file={canonical_file}")
    np.testing.assert_allclose(model.probs, canonical_discrete.probs)
    assert load_discrete(canonical_file).support_max == 4


def test_load_discrete_rejects_bad_file(tmp_path):
    path = tmp_path.joinpath("bad.txt")
    path.write_text("0.5\n0.4\n")
    with pytest.raises(ValueError):
        load_discrete(path)


@pytest.mark.parametrize(
    "spec", ["cauchy:c=1", "log-tail:c=0.5,d=1", "log-tail:c", "pareto:scale=1", "log-tail:c=-1"]
)
def test_parse_model_rejects(spec):
    with pytest.raises(ValueError):
        parse_model(spec)


if __name__ == "__main__":
    pytest.main()
