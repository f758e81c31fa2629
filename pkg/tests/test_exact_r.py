import math

import ibis
import numpy as np
import pandas as pd
import pytest
from scipy import integrate

from arpersist.errors import HypothesisError
from arpersist.exact_r import (
    TableColumns,
    c_big,
    cdf_grid,
    cell_index,
    check_harmonicity,
    cj,
    cj_constant,
    drift_residual,
    drift_threshold,
    expected_T_exact,
    harmonic_G,
    harmonic_growth_ratio,
    harmonic_table,
    infinite_product,
    integrated_tail,
    karamata_prefactor,
    kappa,
    recurrence_partial_sums,
    renewal_upper_bound,
    tail_at,
    tail_table,
    transient_asymptote,
    transient_return_prob,
    u0_drift,
    u0_drift_exchange,
    u0_integral,
    ueps_integral,
    upper_bound_start,
)
from arpersist.harness import brute_force_tail
from arpersist.innovations import DiscreteInteger, LogTail

from .utils import assert_ibis_all, is_non_increasing


def test_cell_index():
    assert cell_index(0.5, 1.5) == 0
    assert cell_index(0.5, 1.6) == 1
    assert cell_index(0.5, 0.6) == 0
    with pytest.raises(ValueError):
        cell_index(0.5, 0.5)


def test_cdf_grid(canonical_discrete):
    grid = cdf_grid(canonical_discrete, 0.5, 6)
    np.testing.assert_allclose(grid.p, [0.5, 0.7, 0.8, 0.9, 1.0, 1.0, 1.0])
    np.testing.assert_allclose(grid.p + grid.sf, np.ones(7))
    assert grid.products[0] == 1.0
    assert grid.products[5] == pytest.approx(0.252)


def test_cdf_grid_hypothesis():
    with pytest.raises(HypothesisError):
        cdf_grid(DiscreteInteger.point_mass(0), 0.5, 10)
    with pytest.raises(HypothesisError):
        cdf_grid(LogTail(0.5), 0.0, 10)


def test_canonical_tail_values(canonical_discrete):
    table = tail_table(cdf_grid(canonical_discrete, 0.5, 20), 20)
    assert table.v[0] == 1.0
    assert table.v[1] == pytest.approx(0.5, abs=1e-14)
    assert table.v[2] == pytest.approx(0.4, abs=1e-14)
    assert table.v[3] == pytest.approx(0.345, abs=1e-14)
    assert is_non_increasing(table.v)


def test_tail_at_matches_brute_force(canonical_discrete):
    table = tail_table(cdf_grid(canonical_discrete, 0.5, 12), 12)
    for k in range(4):
        for n in range(13):
            exact = brute_force_tail(canonical_discrete, 0.5, 0.5 + k + 1, n)
            assert tail_at(table, n, k) == pytest.approx(exact, abs=1e-12)


def test_tail_at_short_horizon(canonical_discrete):
    table = tail_table(cdf_grid(canonical_discrete, 0.5, 5), 5)
    assert tail_at(table, 2, 3) == 1.0
    with pytest.raises(ValueError):
        tail_at(table, 6, 1)


def test_tail_table_exports(canonical_discrete, tmp_path):
    table = tail_table(cdf_grid(canonical_discrete, 0.5, 10), 10)
    frame = table.to_ibis()
    assert list(frame.columns) == [TableColumns.N.value, TableColumns.V_N.value]
    assert assert_ibis_all(frame, (ibis._.v_n >= 0) & (ibis._.v_n <= 1))
    path = tmp_path.joinpath("v.csv")
    table.write_csv(path)
    loaded = pd.read_csv(path)
    assert len(loaded) == 11
    assert loaded["v_n"][2] == pytest.approx(0.4, abs=1e-14)


def test_harmonic_table(canonical_discrete):
    grid = cdf_grid(canonical_discrete, 0.5, 10)
    table = harmonic_table(grid, 5)
    np.testing.assert_allclose(table.G, [1.0, 1.5, 1.85, 2.13, 2.382, 2.634])
    assert list(table.to_pandas().columns) == [TableColumns.N.value, TableColumns.G_N.value]
    assert table.to_ibis().count().to_pandas() == 6
    assert harmonic_G(grid, 2.5) == pytest.approx(1.5)
    assert harmonic_G(grid, 1.0) == 1.0


def test_expected_T_exact(canonical_discrete):
    grid = cdf_grid(canonical_discrete, 0.5, 10)
    assert infinite_product(canonical_discrete, 0.5) == pytest.approx(0.252)
    assert expected_T_exact(grid, 1.5) == pytest.approx(3.968254, abs=1e-6)
    assert expected_T_exact(grid, 2.5) == pytest.approx(5.952381, abs=1e-6)


def test_expected_T_matches_summed_tails(canonical_discrete):
    grid = cdf_grid(canonical_discrete, 0.5, 2000)
    table = tail_table(grid, 2000)
    summed = math.fsum(tail_at(table, n, 1) for n in range(2001))
    assert summed == pytest.approx(expected_T_exact(grid, 2.5), abs=1e-8)


def test_expected_T_infinite_for_log_tail(log_tail_half):
    grid = cdf_grid(log_tail_half, 1.0, 10)
    assert math.isinf(expected_T_exact(grid, 3.0))
    assert infinite_product(log_tail_half, 1.0) == 0.0


def test_infinite_product_pareto(pareto):
    # prod_{m>=2} (1 - 1/m^2) = 1/2
    assert infinite_product(pareto, 1.0) == pytest.approx(0.5, rel=1e-9)


def test_harmonicity_log_tail(log_tail_half):
    for x in (1.5, 3.5, 20.2):
        assert abs(check_harmonicity(log_tail_half, 1.0, x)) < 1e-10


@pytest.mark.parametrize("c", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("x", [1.3, 2.7, 5.5, 20.2])
def test_harmonicity_log_tail_grid(c, x):
    assert abs(check_harmonicity(LogTail(c), 1.0, x)) < 1e-6


def test_harmonicity_fails_for_finite_mean(pareto):
    for x in (1.3, 1.9):
        assert check_harmonicity(pareto, 1.0, x) > 1e-3


def test_harmonicity_defect_equals_product(canonical_discrete, pareto):
    assert check_harmonicity(canonical_discrete, 0.5, 1.5) == pytest.approx(0.252, abs=1e-12)
    assert check_harmonicity(pareto, 1.0, 2.5) == pytest.approx(0.5, abs=1e-8)


def test_recurrence_partial_sums(canonical_discrete):
    grid = cdf_grid(canonical_discrete, 0.5, 10)
    sums = recurrence_partial_sums(grid, 3)
    np.testing.assert_allclose(sums, [0.0, 0.5, 0.85, 1.13])
    with pytest.raises(ValueError):
        recurrence_partial_sums(grid, 20)


def test_transient_return_prob(log_tail_transient):
    grid = cdf_grid(log_tail_transient, 1.0, 100)
    long_grid = cdf_grid(log_tail_transient, 1.0, 5000)
    near, far = transient_return_prob(grid, 2.0), transient_return_prob(grid, 50.0)
    assert 0 < near < far < 1
    assert transient_return_prob(long_grid, 2.0) == pytest.approx(near, rel=1e-10)


def test_transient_asymptote(log_tail_transient):
    grid = cdf_grid(log_tail_transient, 1.0, 200)
    returns = 1.0 - transient_return_prob(grid, 11.0)
    assert returns / transient_asymptote(grid, 11.0) == pytest.approx(1.0, rel=0.25)


def test_transient_needs_transient_model(log_tail_half):
    grid = cdf_grid(log_tail_half, 1.0, 10)
    with pytest.raises(HypothesisError):
        transient_return_prob(grid, 3.0)


def test_karamata_prefactor_converges(log_tail_transient):
    grid = cdf_grid(log_tail_transient, 1.0, 4000)
    # Gamma(x0 + c) / Gamma(x0) for x0 = 1
    assert karamata_prefactor(grid, 4000) == pytest.approx(math.gamma(2.5), rel=1e-2)


def test_harmonic_growth_ratio_settles(log_tail_half):
    grid = cdf_grid(log_tail_half, 1.0, 4000)
    table = harmonic_table(grid, 4000)
    first, second = harmonic_growth_ratio(table, 1000), harmonic_growth_ratio(table, 4000)
    assert first == pytest.approx(second, rel=0.05)


def test_ueps_closed_form(log_tail_half):
    for eps in (0.0, 0.5):
        b = (1.0 + eps) * 0.5
        expected, _ = integrate.quad(lambda y: (0.5 / (0.5 + y)) ** b, 0.0, 7.0, epsrel=1e-12)
        assert ueps_integral(log_tail_half, 7.0, eps) == pytest.approx(expected, rel=1e-10)
    assert u0_integral(log_tail_half, -1.0) == 0.0
    np.testing.assert_array_equal(u0_integral(log_tail_half, np.array([-2.0, 0.0])), [0.0, 0.0])


def test_ueps_quadrature(pareto):
    # int_0^y P(eta > s) ds = y / (1 + y) for the Pareto(2, 1) law
    assert integrated_tail(pareto, 3.0) == pytest.approx(0.75)
    expected, _ = integrate.quad(lambda y: math.exp(-y / (1.0 + y)), 0.0, 5.0, epsrel=1e-12)
    assert u0_integral(pareto, 5.0) == pytest.approx(expected, rel=1e-8)


def test_ueps_rejects_eps(log_tail_half):
    with pytest.raises(ValueError):
        ueps_integral(log_tail_half, 1.0, 1.0)
    with pytest.raises(ValueError):
        ueps_integral(log_tail_half, 1.0, -0.1)


def test_kappa():
    assert kappa(0.5) == pytest.approx(2.0 / math.pi)
    with pytest.raises(ValueError):
        kappa(1.0)


def test_drift(log_tail_half):
    assert u0_drift(log_tail_half, 2.0, 5.0) >= 0
    assert drift_residual(log_tail_half, 2.0, 5.0, 0.0) == pytest.approx(
        2.0 * u0_drift(log_tail_half, 2.0, 5.0), rel=1e-6
    )
    assert u0_drift_exchange(log_tail_half, 5.0) >= 0
    assert u0_drift_exchange(log_tail_half, 500.0) < u0_drift_exchange(log_tail_half, 5.0)


def test_drift_needs_log_tail(pareto, log_tail_half):
    with pytest.raises(HypothesisError):
        drift_residual(pareto, 2.0, 5.0, 0.1)
    with pytest.raises(ValueError):
        drift_threshold(log_tail_half, 2.0, 0.1, [5.0, 2.0])


def test_drift_threshold(log_tail_half):
    grid = [10.0 * k for k in range(1, 101)]
    assert drift_threshold(log_tail_half, 2.0, 0.5, grid) == 10.0
    assert all(drift_residual(log_tail_half, 2.0, z, 0.5) <= 0 for z in grid)


def test_cj(pareto):
    assert cj_constant() == pytest.approx(3.0 / math.pi**2)
    values = cj(pareto, 2.0, 1.0, np.arange(50))
    assert np.all((values >= 0) & (values <= 1))


def test_c_big(pareto):
    direct = float(np.sum(cj(pareto, 2.0, 1.0, np.arange(1 << 20))))
    assert c_big(pareto, 2.0, 1.0) == pytest.approx(direct, rel=1e-5)


def test_c_big_diverges(log_tail_half):
    with pytest.raises(HypothesisError):
        c_big(log_tail_half, 2.0, 1.0)


def test_renewal_upper_bound(pareto):
    n0 = upper_bound_start(2.0, 10.0, 1.0)
    assert n0 == 5
    w = renewal_upper_bound(pareto, 2.0, 1.0, n0, 30)
    assert len(w) == 31
    np.testing.assert_array_equal(w[:n0], np.ones(n0))
    assert np.all(w >= 0)


if __name__ == "__main__":
    pytest.main()
