"""OLS with Newey-West HAC covariance and the beta = 1 efficiency tests.

The HAC estimator is the textbook one: Bartlett weights ``1 - j/(L+1)``,
no prewhitening and no small-sample degrees-of-freedom correction. p-values
use the standard normal reference distribution.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .data_io import YieldObservation

DEFAULT_LAGS = 10
SUMMARY_COLUMNS = ("psi_eth", "psi_steth", "gamma_eth", "gamma_steth", "steth_eth_ratio")


class DegenerateRegressorError(ValueError):
    pass


class UndefinedTestError(ValueError):
    pass


class OLSFit(NamedTuple):
    alpha_hat: float
    beta_hat: float
    residuals: np.ndarray
    r_squared: float


@dataclass(frozen=True)
class RegressionResult:
    alpha_hat: float
    beta_hat: float
    hac_se_alpha: float
    hac_se_beta: float
    t_stat_beta_eq_1: float
    p_value: float
    r_squared: float
    n_obs: int
    lags: int

    def as_dict(self) -> dict:
        return asdict(self)


def ols(y, x) -> OLSFit:
    """Least-squares fit of ``y = alpha + beta * x``.

    R-squared is reported as 0 when ``y`` has no variation.
    """
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if y.shape != x.shape or y.ndim != 1:
        raise ValueError(f"y and x must be 1-d series of equal length, got {y.shape} and {x.shape}")
    n = y.size
    if n < 3:
        raise ValueError("need at least 3 observations")
    x_bar = x.mean()
    y_bar = y.mean()
    dx = x - x_bar
    sxx = float(dx @ dx)
    if sxx <= (np.finfo(float).eps * n * float(np.abs(x).max())) ** 2:
        raise DegenerateRegressorError("regressor is constant; slope is not identified")
    beta = float(dx @ (y - y_bar)) / sxx
    alpha = float(y_bar - beta * x_bar)
    resid = y - alpha - beta * x
    dy = y - y_bar
    tss = float(dy @ dy)
    r2 = 0.0 if tss == 0.0 else min(max(1.0 - float(resid @ resid) / tss, 0.0), 1.0)
    return OLSFit(alpha, beta, resid, r2)


def newey_west_cov(x, residuals, lags: int) -> np.ndarray:
    """HAC covariance of (alpha_hat, beta_hat) for a regression on ``[1, x]``."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(residuals, dtype=float)
    n = x.size
    if u.shape != x.shape:
        raise ValueError("x and residuals must have equal length")
    if lags < 0:
        raise ValueError("lags must be >= 0")
    if lags >= n:
        raise ValueError(f"lags ({lags}) must be smaller than the sample size ({n})")
    X = np.column_stack([np.ones(n), x])
    g = X * u[:, None]
    S = g.T @ g
    for j in range(1, lags + 1):
        gamma_j = g[j:].T @ g[:-j]
        S += (1.0 - j / (lags + 1)) * (gamma_j + gamma_j.T)
    bread = np.linalg.inv(X.T @ X)
    cov = bread @ S @ bread
    return 0.5 * (cov + cov.T)


def normal_two_sided_p(t: float) -> float:
    return math.erfc(abs(t) / math.sqrt(2.0))


def test_beta_equals_one(beta_hat: float, se_beta: float) -> tuple[float, float]:
    """t-statistic and two-sided normal p-value for H0: beta = 1."""
    if not se_beta > 0:
        raise UndefinedTestError("HAC standard error of beta is zero; the test is undefined")
    t = (beta_hat - 1.0) / se_beta
    return t, normal_two_sided_p(t)


test_beta_equals_one.__test__ = False  # keep pytest from collecting it


def regress(y, x, lags: int = DEFAULT_LAGS) -> RegressionResult:
    fit = ols(y, x)
    cov = newey_west_cov(x, fit.residuals, lags)
    se_alpha = math.sqrt(max(cov[0, 0], 0.0))
    se_beta = math.sqrt(max(cov[1, 1], 0.0))
    t, p = test_beta_equals_one(fit.beta_hat, se_beta)
    return RegressionResult(
        alpha_hat=fit.alpha_hat,
        beta_hat=fit.beta_hat,
        hac_se_alpha=se_alpha,
        hac_se_beta=se_beta,
        t_stat_beta_eq_1=t,
        p_value=p,
        r_squared=fit.r_squared,
        n_obs=len(fit.residuals),
        lags=lags,
    )


def summary_stats(data: Sequence[YieldObservation]) -> dict:
    """Mean, sample SD, min and max per column, plus sample size and date range.

    Yields stay in annualized decimals. The ratio column is summarised over
    the rows that report it and left out when none do.
    """
    if len(data) == 0:
        raise ValueError("no observations")
    columns = {}
    for name in SUMMARY_COLUMNS:
        vals = [getattr(obs, name) for obs in data]
        vals = np.array([v for v in vals if v is not None], dtype=float)
        if vals.size == 0:
            continue
        columns[name] = {
            "mean": float(vals.mean()),
            "sd": float(vals.std(ddof=1)) if vals.size > 1 else 0.0,
            "min": float(vals.min()),
            "max": float(vals.max()),
        }
    return {
        "columns": columns,
        "n_obs": len(data),
        "start": data[0].date.isoformat(),
        "end": data[-1].date.isoformat(),
    }


def efficiency_regressors(data: Sequence[YieldObservation]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(psi_steth, gamma_eth - gamma_steth, psi_eth - gamma_steth)."""
    y = np.array([o.psi_steth for o in data])
    x_staking = np.array([o.gamma_eth - o.gamma_steth for o in data])
    x_lending = np.array([o.psi_eth - o.gamma_steth for o in data])
    return y, x_staking, x_lending


def run_efficiency_tests(
    data: Sequence[YieldObservation], lags: int = DEFAULT_LAGS
) -> tuple[RegressionResult, RegressionResult]:
    """Both market-efficiency regressions of the stETH lending yield.

    The first uses the staking spread ``gamma_eth - gamma_steth``, the second
    the lending spread ``psi_eth - gamma_steth``; efficiency predicts a slope
    of one in each.
    """
    if len(data) < lags + 2:
        raise ValueError(f"need at least lags + 2 = {lags + 2} observations, got {len(data)}")
    y, x_staking, x_lending = efficiency_regressors(data)
    return regress(y, x_staking, lags), regress(y, x_lending, lags)
