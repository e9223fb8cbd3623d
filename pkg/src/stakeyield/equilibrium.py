"""Closed-form equilibrium restrictions linking the three ETH investments."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .data_io import DAYS_PER_YEAR, YieldObservation
from .kernel_mc import EthLend, EthStake, KernelParams, LiquidStake, euler_residual, lemma1_check
from .peg_markov import PegModel, PegState, premium_for


def implied_mean_staking(params: KernelParams, gamma_eth: float, kappa: float) -> float:
    """Expected log ETH return consistent with pricing direct staking."""
    return lemma1_check(gamma_eth - kappa, params)


def implied_mean_lending(params: KernelParams, psi_eth: float) -> float:
    """Expected log ETH return consistent with pricing ETH lending."""
    return lemma1_check(psi_eth, params)


def implied_mean_liquid(
    params: KernelParams,
    peg: PegModel,
    state: PegState,
    gamma_steth: float,
    psi_steth: float,
) -> float:
    """Expected log ETH return consistent with pricing liquid staking.

    The peg premium is evaluated at ``params.lambda_chi``.
    """
    eta_tilde = premium_for(state, peg, params.lambda_chi)
    return lemma1_check(gamma_steth + psi_steth - eta_tilde, params)


def implied_psi_steth_vs_staking(
    gamma_eth: float, gamma_steth: float, eta_tilde: float, kappa: float
) -> float:
    return gamma_eth - gamma_steth + eta_tilde - kappa


def implied_psi_steth_vs_lending(psi_eth: float, gamma_steth: float, eta_tilde: float) -> float:
    return psi_eth - gamma_steth + eta_tilde


def restriction_residuals(
    data: Sequence[YieldObservation],
    peg: PegModel,
    lambda_chi: float = 0.0,
    kappa: float = 0.0,
    day_count: int = DAYS_PER_YEAR,
) -> tuple[np.ndarray, np.ndarray]:
    """Gap between observed stETH lending yield and both implied values, per date.

    ``data`` and ``kappa`` are annualized; the per-period peg premium is
    scaled by ``day_count`` to match. Each date's peg state comes from its
    stETH/ETH ratio (parity when the ratio is missing).
    """
    if len(data) == 0:
        raise ValueError("no observations")
    premium = {s: day_count * premium_for(s, peg, lambda_chi) for s in PegState}
    res4 = np.empty(len(data))
    res5 = np.empty(len(data))
    for i, obs in enumerate(data):
        state = PegState.PARITY
        if obs.steth_eth_ratio is not None:
            state = peg.classify(float(np.log(obs.steth_eth_ratio)))
        eta_tilde = premium[state]
        res4[i] = obs.psi_steth - implied_psi_steth_vs_staking(
            obs.gamma_eth, obs.gamma_steth, eta_tilde, kappa
        )
        res5[i] = obs.psi_steth - implied_psi_steth_vs_lending(obs.psi_eth, obs.gamma_steth, eta_tilde)
    return res4, res5


def verify_propositions(
    *,
    risk_free: float,
    lambda_eth: float,
    lambda_chis,
    v_eth: float,
    peg: PegModel,
    psi_eth: float,
    gamma_steth: float,
    kappa: float = 0.0,
    n_paths: int = 1_000_000,
    seed: int = 0,
    mispricing: float = 0.0,
    antithetic: bool = True,
    workers: int = 1,
    max_z: float = 4.0,
) -> list[dict]:
    """Monte Carlo check that every strategy prices at 1 at its implied yield.

    All inputs are per period. The expected ETH return is pinned by the ETH
    lending restriction; staking then pays ``psi_eth + kappa`` and the stETH
    lending yield is set from the ETH-lending restriction, shifted by
    ``mispricing``. Each strategy and peg state reuses the same seed.
    """
    rows = []
    for lam_chi in lambda_chis:
        base = KernelParams(risk_free, lambda_eth, float(lam_chi), 0.0, v_eth)
        params = KernelParams(
            risk_free, lambda_eth, float(lam_chi), implied_mean_lending(base, psi_eth), v_eth
        )
        for state in PegState:
            eta_tilde = premium_for(state, peg, params.lambda_chi)
            psi_steth = implied_psi_steth_vs_lending(psi_eth, gamma_steth, eta_tilde) + mispricing
            strategies = {
                "eth_stake": EthStake(psi_eth + kappa, kappa),
                "eth_lend": EthLend(psi_eth),
                "liquid_stake": LiquidStake(gamma_steth, psi_steth),
            }
            for name, strategy in strategies.items():
                est = euler_residual(
                    strategy, params, peg, state, n_paths, seed,
                    antithetic=antithetic, workers=workers,
                )
                rows.append({
                    "strategy": name,
                    "state": state.value,
                    "lambda_chi": params.lambda_chi,
                    "mu_eth": params.mu_eth,
                    "eta_tilde": eta_tilde,
                    "mean": est.mean,
                    "std_error": est.std_error,
                    "z": est.z_score,
                    "n_paths": est.n_paths,
                    "pass": est.z_score <= max_z,
                })
    return rows
