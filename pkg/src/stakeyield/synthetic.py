"""Synthetic yield panels, with and without the equilibrium restrictions.

Underlying yields follow stationary AR(1) processes in annualized units.
Equilibrium panels set the stETH lending yield to the ETH-lending-implied
value plus i.i.d. measurement noise; frictional panels draw it from an
independent low-mean AR(1), so it ignores the spreads entirely.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .data_io import DAYS_PER_YEAR, LIDO_FEE_SHARE, YieldObservation
from .equilibrium import implied_psi_steth_vs_lending
from .peg_markov import PegModel, PegState, premium_for, simulate_peg_path

SAMPLE_START = dt.date(2023, 1, 30)


@dataclass(frozen=True)
class AR1:
    """Stationary AR(1): ``x_t = mean + rho (x_{t-1} - mean) + sd sqrt(1-rho^2) e_t``.

    ``sd`` is the stationary standard deviation.
    """

    mean: float
    sd: float
    rho: float

    def __post_init__(self):
        if not abs(self.rho) < 1:
            raise ValueError(f"AR(1) coefficient must satisfy |rho| < 1, got {self.rho!r}")
        if self.sd < 0:
            raise ValueError("AR(1) sd must be non-negative")

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        e = rng.standard_normal(n)
        x = np.empty(n)
        x[0] = self.mean + self.sd * e[0]
        scale = self.sd * math.sqrt(1.0 - self.rho**2)
        for t in range(1, n):
            x[t] = self.mean + self.rho * (x[t - 1] - self.mean) + scale * e[t]
        return x


@dataclass(frozen=True)
class GeneratorConfig:
    """Inputs for both generators; yields, noise and kappa are annualized.

    The default peg chain is absorbing at parity, which keeps the peg
    premium constant across the sample; give ``p_stay_parity < 1`` to let
    de-pegs occur.
    """

    horizon: int = 966
    gamma_eth: AR1 = field(default_factory=lambda: AR1(0.0329, 0.0064, 0.98))
    psi_eth: AR1 = field(default_factory=lambda: AR1(0.0192, 0.0065, 0.95))
    psi_steth_frictional: AR1 = field(default_factory=lambda: AR1(0.0005, 0.0007, 0.9))
    fee: float = LIDO_FEE_SHARE
    kappa: float = 0.0
    lambda_chi: float = 0.0
    peg: PegModel = field(default_factory=lambda: PegModel(0.01, 1.0, 0.5))
    noise_sd: float = 0.0002
    day_count: int = DAYS_PER_YEAR
    start: dt.date = SAMPLE_START

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if not 0 <= self.fee <= 1:
            raise ValueError("fee share must lie in [0, 1]")
        if self.fee == 1:
            raise ValueError(
                "fee share of 1 makes gamma_eth - gamma_steth identically zero; "
                "the staking-spread regression would have a constant regressor"
            )
        if self.kappa < 0 or self.noise_sd < 0:
            raise ValueError("kappa and noise_sd must be non-negative")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["start"] = self.start.isoformat()
        return d


def _streams(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def _peg_columns(config: GeneratorConfig, seed_seq: int) -> tuple[list[PegState], np.ndarray]:
    path = simulate_peg_path(config.peg, PegState.PARITY, config.horizon, seed_seq)
    ratio = np.array([math.exp(s.log_ratio(config.peg)) for s in path])
    return path, ratio


def _assemble(config, gamma_eth, psi_eth, psi_steth, ratio) -> list[YieldObservation]:
    gamma_steth = config.fee * gamma_eth
    out = []
    for t in range(config.horizon):
        out.append(YieldObservation(
            date=config.start + dt.timedelta(days=t),
            psi_eth=float(psi_eth[t]),
            psi_steth=float(psi_steth[t]),
            gamma_eth=float(gamma_eth[t]),
            gamma_steth=float(gamma_steth[t]),
            steth_eth_ratio=float(ratio[t]),
        ))
    return out


def generate_equilibrium(config: GeneratorConfig, seed: int) -> list[YieldObservation]:
    """Panel on which both stETH lending restrictions hold up to noise.

    ETH lending pays ``gamma_eth - kappa`` so that the staking and lending
    restrictions agree.
    """
    rng_gamma, rng_noise, rng_peg = _streams(seed, 3)
    gamma_eth = np.maximum(config.gamma_eth.sample(config.horizon, rng_gamma), config.kappa)
    psi_eth = gamma_eth - config.kappa
    gamma_steth = config.fee * gamma_eth
    path, ratio = _peg_columns(config, int(rng_peg.integers(2**63)))
    premium = {s: config.day_count * premium_for(s, config.peg, config.lambda_chi) for s in PegState}
    eta_tilde = np.array([premium[s] for s in path])
    psi_steth = implied_psi_steth_vs_lending(psi_eth, gamma_steth, eta_tilde)
    psi_steth = psi_steth + config.noise_sd * rng_noise.standard_normal(config.horizon)
    return _assemble(config, gamma_eth, psi_eth, np.maximum(psi_steth, 0.0), ratio)


def generate_frictional(config: GeneratorConfig, seed: int) -> list[YieldObservation]:
    """Panel whose stETH lending yield is unrelated to the other yields.

    ETH lending follows its own AR(1) here, as the lending and staking
    markets are not assumed to be linked either.
    """
    rng_gamma, rng_psi, rng_peg, rng_steth = _streams(seed, 4)
    gamma_eth = np.maximum(config.gamma_eth.sample(config.horizon, rng_gamma), 0.0)
    psi_eth = np.maximum(config.psi_eth.sample(config.horizon, rng_psi), 0.0)
    _, ratio = _peg_columns(config, int(rng_peg.integers(2**63)))
    psi_steth = np.maximum(config.psi_steth_frictional.sample(config.horizon, rng_steth), 0.0)
    return _assemble(config, gamma_eth, psi_eth, psi_steth, ratio)
