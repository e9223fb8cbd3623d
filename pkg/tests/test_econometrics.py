import datetime as dt
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from stakeyield.data_io import YieldObservation
from stakeyield.econometrics import (
    DegenerateRegressorError,
    UndefinedTestError,
    newey_west_cov,
    normal_two_sided_p,
    ols,
    regress,
    run_efficiency_tests,
    summary_stats,
    test_beta_equals_one as beta_unity_test,
)

from oracles import nw_oracle, white_direct

# 4-observation instance: x = 0..3, y = (1, 3, 2, 5). OLS gives alpha = beta = 11/10 and
# residuals (-1/10, 4/5, -13/10, 3/5). Covariances below were evaluated in exact rational
# arithmetic by `oracles.nw_oracle` and frozen.
X4 = [0, 1, 2, 3]
Y4 = [1, 3, 2, 5]
NW1_EXACT = [[Fraction(451, 5000), Fraction(-443, 10000)], [Fraction(-443, 10000), Fraction(103, 2500)]]
NW0_EXACT = [[Fraction(693, 5000), Fraction(-81, 2500)], [Fraction(-81, 2500), Fraction(283, 5000)]]


def test_oracle_reproduces_frozen_values():
    cov1, alpha, beta = nw_oracle(X4, Y4, 1)
    assert (alpha, beta) == (Fraction(11, 10), Fraction(11, 10))
    assert cov1 == NW1_EXACT
    assert nw_oracle(X4, Y4, 0)[0] == NW0_EXACT


@pytest.mark.parametrize("lags,expected", [(1, NW1_EXACT), (0, NW0_EXACT)])
def test_newey_west_four_observation_instance(lags, expected):
    fit = ols(Y4, X4)
    cov = newey_west_cov(X4, fit.residuals, lags)
    assert np.max(np.abs(cov - np.array(expected, dtype=float))) < 1e-12


def test_ols_exact_line():
    x = np.linspace(-1, 2, 20)
    fit = ols(x, x)
    assert fit.alpha_hat == pytest.approx(0.0, abs=1e-15)
    assert fit.beta_hat == pytest.approx(1.0, rel=1e-15)
    assert np.max(np.abs(fit.residuals)) < 1e-15
    assert fit.r_squared == 1.0


def test_ols_constant_y():
    fit = ols([2.5, 2.5, 2.5, 2.5], [0.0, 1.0, 3.0, 7.0])
    assert fit.alpha_hat == 2.5 and fit.beta_hat == 0.0
    assert np.all(fit.residuals == 0.0)
    assert fit.r_squared == 0.0


def test_ols_three_point_hand_solution():
    fit = ols([1.0, 2.0, 2.0], [0.0, 1.0, 2.0])
    assert abs(fit.beta_hat - 0.5) < 1e-12
    assert abs(fit.alpha_hat - 7 / 6) < 1e-12


def test_residuals_orthogonal_to_design():
    rng = np.random.default_rng(0)
    x = rng.normal(size=200)
    y = 0.3 + 2 * x + rng.normal(size=200)
    u = ols(y, x).residuals
    assert abs(u.sum()) < 1e-12 and abs(u @ x) < 1e-12


@pytest.mark.parametrize("y,x,err", [
    ([1.0, 2.0, 3.0], [1.0, 1.0, 1.0], DegenerateRegressorError),
    ([1.0, 2.0], [1.0, 2.0], ValueError),
    ([1.0, 2.0, 3.0], [1.0, 2.0], ValueError),
])
def test_ols_errors(y, x, err):
    with pytest.raises(err):
        ols(y, x)


def test_constant_decimal_regressor_is_degenerate():
    with pytest.raises(DegenerateRegressorError):
        ols([0.1, 0.3, 0.2, 0.5], [0.0033] * 4)


def test_newey_west_lag_bounds():
    with pytest.raises(ValueError):
        newey_west_cov([0.0, 1.0, 2.0], [0.1, -0.2, 0.1], 3)
    with pytest.raises(ValueError):
        newey_west_cov([0.0, 1.0, 2.0], [0.1, -0.2, 0.1], -1)


finite = st.floats(-10, 10, allow_nan=False)


@settings(max_examples=50)
@given(st.lists(st.tuples(finite, finite), min_size=5, max_size=40))
def test_nw0_equals_white(pairs):
    x = np.array([p[0] for p in pairs])
    y = np.array([p[1] for p in pairs])
    assume(np.ptp(x) > 1e-3)
    u = ols(y, x).residuals
    got = newey_west_cov(x, u, 0)
    want = white_direct(list(x), list(u))
    assert np.max(np.abs(got - want)) <= 1e-12 * max(1.0, np.max(np.abs(want)))


def test_nw_matches_rational_oracle_on_longer_sample():
    rng = np.random.default_rng(5)
    x = np.round(rng.normal(size=30), 4)
    y = np.round(0.2 + 0.7 * x + rng.normal(size=30), 4)
    want, _, _ = nw_oracle([str(v) for v in x], [str(v) for v in y], 4)
    got = newey_west_cov(x, ols(y, x).residuals, 4)
    assert np.allclose(got, np.array(want, dtype=float), rtol=1e-11, atol=0)


def test_nw_lags_irrelevant_for_iid_errors():
    rng = np.random.default_rng(12)
    x = rng.normal(size=100_000)
    y = 1.0 + 0.5 * x + rng.normal(size=100_000)
    u = ols(y, x).residuals
    ratio = np.sqrt(newey_west_cov(x, u, 10)[1, 1] / newey_west_cov(x, u, 0)[1, 1])
    assert ratio == pytest.approx(1.0, abs=0.03)


def test_against_statsmodels_hac():
    sm = pytest.importorskip("statsmodels.api")
    rng = np.random.default_rng(9)
    x = np.cumsum(rng.normal(size=300)) * 0.01
    y = 0.1 + 0.4 * x + np.convolve(rng.normal(size=310), np.ones(10) / 10, "valid")[:300]
    res = sm.OLS(y, sm.add_constant(x)).fit(cov_type="HAC", cov_kwds={"maxlags": 10, "use_correction": False})
    ours = newey_west_cov(x, ols(y, x).residuals, 10)
    assert np.allclose(ours, res.cov_params(), rtol=1e-10)


@given(st.floats(-1e3, 1e3))
def test_p_value_symmetry(t):
    assert normal_two_sided_p(t) == normal_two_sided_p(-t)


def test_beta_unity_examples():
    t, p = beta_unity_test(1.0, 0.3)
    assert t == 0.0 and p == 1.0
    t, p = beta_unity_test(-0.228, 0.043)
    assert t == pytest.approx(-28.558, abs=1e-3)
    assert p < 0.001
    t, _ = beta_unity_test(0.017, 0.005)
    assert t == pytest.approx(-196.6, abs=1e-9)


def test_beta_unity_needs_positive_se():
    with pytest.raises(UndefinedTestError):
        beta_unity_test(0.5, 0.0)


def test_two_sided_p_at_critical_value():
    assert normal_two_sided_p(1.959963984540054) == pytest.approx(0.05, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 100), st.floats(-5, 5))
def test_scale_and_shift(c, shift):
    rng = np.random.default_rng(3)
    x = rng.normal(size=60)
    y = 0.5 - 0.3 * x + rng.normal(size=60)
    base = regress(y, x, 3)
    scaled = regress(c * y, x, 3)
    assert scaled.beta_hat == pytest.approx(c * base.beta_hat, rel=1e-10)
    assert scaled.alpha_hat == pytest.approx(c * base.alpha_hat, rel=1e-10)
    assert scaled.hac_se_beta == pytest.approx(c * base.hac_se_beta, rel=1e-10)
    assert scaled.hac_se_alpha == pytest.approx(c * base.hac_se_alpha, rel=1e-10)
    shifted = regress(y, x + shift, 3)
    assert shifted.beta_hat == pytest.approx(base.beta_hat, rel=1e-10, abs=1e-10)
    assert shifted.alpha_hat == pytest.approx(base.alpha_hat - base.beta_hat * shift, rel=1e-10, abs=1e-10)


def test_regression_result_invariants():
    rng = np.random.default_rng(4)
    x = rng.normal(size=100)
    res = regress(2 * x + rng.normal(size=100), x, 10)
    assert res.hac_se_beta > 0 and res.hac_se_alpha > 0
    assert 0 <= res.r_squared <= 1
    assert res.t_stat_beta_eq_1 == (res.beta_hat - 1) / res.hac_se_beta
    assert res.n_obs == 100 and res.lags == 10


def _panel(rows):
    start = dt.date(2023, 1, 30)
    return [YieldObservation(start + dt.timedelta(days=i), *r) for i, r in enumerate(rows)]


def test_summary_single_row():
    s = summary_stats(_panel([(0.02, 0.001, 0.033, 0.0297, 0.999)]))
    for col in s["columns"].values():
        assert col["mean"] == col["min"] == col["max"] and col["sd"] == 0.0
    assert s["n_obs"] == 1 and s["start"] == s["end"] == "2023-01-30"


def test_summary_constant_column_and_missing_ratio():
    s = summary_stats(_panel([(0.02, 0.001 * i, 0.033, 0.0297, None) for i in range(4)]))
    assert s["columns"]["psi_eth"]["sd"] == 0.0
    assert "steth_eth_ratio" not in s["columns"]
    assert s["columns"]["psi_steth"]["sd"] == pytest.approx(np.std([0, 0.001, 0.002, 0.003], ddof=1))


def test_summary_empty():
    with pytest.raises(ValueError):
        summary_stats([])


def test_efficiency_tests_regressors():
    rng = np.random.default_rng(1)
    rows = []
    for _ in range(40):
        g = 0.03 + 0.005 * rng.random()
        psi = 0.02 + 0.005 * rng.random()
        rows.append((psi, 0.001 + 0.001 * rng.random(), g, 0.9 * g, None))
    panel = _panel(rows)
    first, second = run_efficiency_tests(panel, lags=5)
    y = np.array([r[1] for r in rows])
    assert first == regress(y, np.array([r[2] - r[3] for r in rows]), 5)
    assert second == regress(y, np.array([r[0] - r[3] for r in rows]), 5)


def test_efficiency_tests_need_enough_rows():
    with pytest.raises(ValueError):
        run_efficiency_tests(_panel([(0.02, 0.001, 0.03 + i / 1000, 0.027, None) for i in range(11)]), lags=10)
