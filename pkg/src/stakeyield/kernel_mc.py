"""Pricing kernel and a brute-force Monte Carlo check of the Euler equation.

Randomness is counter based: paths are cut into fixed-size blocks and block
``b`` draws from ``Philox(key=seed, counter=b << 192)``, so a block's draws
depend only on ``(seed, b)``. Workers may take blocks in any order; block
sums are combined with ``math.fsum`` so the estimate is bit-identical for any
worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Union

import numpy as np

from .peg_markov import PegModel, PegState

MIN_PATHS = 1000
BLOCK_SIZE = 1 << 16


class MonteCarloConfigError(ValueError):
    pass


@dataclass(frozen=True)
class KernelParams:
    """Per-period kernel inputs.

    ``mu_eth`` and ``v_eth`` are the conditional mean and variance of the
    log ETH return over one period.
    """

    risk_free: float
    lambda_eth: float
    lambda_chi: float
    mu_eth: float
    v_eth: float

    def __post_init__(self):
        for name in ("risk_free", "lambda_eth", "lambda_chi", "mu_eth", "v_eth"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.v_eth <= 0:
            raise ValueError("v_eth must be positive")

    @property
    def vol(self) -> float:
        return math.sqrt(self.v_eth)


@dataclass(frozen=True)
class EthStake:
    gamma_eth: float
    kappa: float = 0.0

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("staking cost kappa must be non-negative")


@dataclass(frozen=True)
class EthLend:
    psi_eth: float


@dataclass(frozen=True)
class LiquidStake:
    gamma_steth: float
    psi_steth: float


Strategy = Union[EthStake, EthLend, LiquidStake]


@dataclass(frozen=True)
class EulerEstimate:
    mean: float
    std_error: float
    n_paths: int

    @property
    def z_score(self) -> float:
        """Distance of the estimate from 1 in standard errors."""
        if self.std_error == 0:
            return 0.0 if self.mean == 1.0 else math.inf
        return abs(self.mean - 1.0) / self.std_error


def normalizing_constant(state: PegState, model: PegModel, lambda_chi: float) -> float:
    """xi = -log E[exp(-lambda_chi * omega) | state]."""
    p_stay = model.p_stay_parity if state is PegState.PARITY else model.p_stay_depeg
    if state is PegState.PARITY:
        # omega = 1 only on leaving parity
        return -math.log(p_stay + (1.0 - p_stay) * math.exp(-lambda_chi))
    return -math.log(p_stay * math.exp(-lambda_chi) + (1.0 - p_stay))


def kernel_draw(params: KernelParams, eps, omega, xi: float):
    """Kernel realisation(s) for ETH shock ``eps`` and de-peg indicator ``omega``.

    Accepts scalars or numpy arrays.
    """
    lam = params.lambda_eth
    return np.exp(-params.risk_free - 0.5 * lam * lam - lam * eps - params.lambda_chi * omega + xi)


def _log_yield_and_peg(strategy: Strategy) -> tuple[float, bool]:
    if isinstance(strategy, EthStake):
        return strategy.gamma_eth - strategy.kappa, False
    if isinstance(strategy, EthLend):
        return strategy.psi_eth, False
    if isinstance(strategy, LiquidStake):
        return strategy.gamma_steth + strategy.psi_steth, True
    raise TypeError(f"unknown strategy {strategy!r}")


def strategy_gross_return(strategy: Strategy, r_eth, chi_now, chi_next):
    """Gross one-period return; only liquid staking carries the peg move."""
    y, pegged = _log_yield_and_peg(strategy)
    if pegged:
        return np.exp(y + r_eth + chi_next - chi_now)
    return np.exp(y + r_eth)


def lemma1_check(y: float, params: KernelParams) -> float:
    """Conditional mean log ETH return that prices exp(y + r_eth) exactly."""
    return params.risk_free + params.lambda_eth * params.vol - y - params.v_eth / 2


def _block_moments(
    strategy: Strategy,
    params: KernelParams,
    peg: PegModel,
    state: PegState,
    seed: int,
    block: int,
    size: int,
    antithetic: bool,
) -> tuple[int, float, float]:
    rng = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, block]))
    n_eps = size // 2 if antithetic else size
    eps = rng.standard_normal(n_eps)
    if antithetic:
        eps = np.concatenate([eps, -eps])
    omega = (rng.random(size) < peg.prob_depeg_next(state)).astype(float)
    xi = normalizing_constant(state, peg, params.lambda_chi)
    r_eth = params.mu_eth + params.vol * eps
    chi_now = state.log_ratio(peg)
    chi_next = -peg.eta * omega
    x = kernel_draw(params, eps, omega, xi) * strategy_gross_return(strategy, r_eth, chi_now, chi_next)
    if antithetic:
        x = 0.5 * (x[:n_eps] + x[n_eps:])
    d = x - 1.0
    return x.size, float(np.sum(d)), float(np.sum(d * d))


def euler_residual(
    strategy: Strategy,
    params: KernelParams,
    peg: PegModel,
    state: PegState,
    n_paths: int,
    seed: int,
    *,
    antithetic: bool = True,
    workers: int = 1,
) -> EulerEstimate:
    """Monte Carlo estimate of E[kernel * gross return | state].

    With antithetic sampling each independent draw is the average over the
    pair (eps, -eps), each leg with its own peg outcome; the standard error
    is computed over those pair averages.
    """
    if n_paths < MIN_PATHS:
        raise MonteCarloConfigError(f"n_paths must be >= {MIN_PATHS}, got {n_paths}")
    if antithetic and n_paths % 2:
        raise MonteCarloConfigError("antithetic sampling needs an even n_paths")
    if seed < 0:
        raise MonteCarloConfigError("seed must be non-negative")
    if workers < 1:
        raise MonteCarloConfigError("workers must be >= 1")

    sizes = [BLOCK_SIZE] * (n_paths // BLOCK_SIZE)
    if n_paths % BLOCK_SIZE:
        sizes.append(n_paths % BLOCK_SIZE)

    def run(b: int):
        return _block_moments(strategy, params, peg, state, seed, b, sizes[b], antithetic)

    if workers == 1:
        parts = [run(b) for b in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))

    n = sum(p[0] for p in parts)
    s1 = math.fsum(p[1] for p in parts)
    s2 = math.fsum(p[2] for p in parts)
    mean_dev = s1 / n
    var = max(s2 - n * mean_dev * mean_dev, 0.0) / (n - 1)
    return EulerEstimate(1.0 + mean_dev, math.sqrt(var / n), n_paths)
