"""No-arbitrage restrictions for ETH staking, ETH lending and liquid staking."""

__version__ = "0.1.0"

from .peg_markov import PegModel, PegState, RiskAdjustedPeg, estimate_peg_model, peg_premium, risk_adjust
from .kernel_mc import EthLend, EthStake, EulerEstimate, KernelParams, LiquidStake, euler_residual
from .data_io import YieldObservation, read_panel, write_panel
from .econometrics import RegressionResult, run_efficiency_tests, summary_stats
from .synthetic import GeneratorConfig, generate_equilibrium, generate_frictional

__all__ = [
    "EthLend",
    "EthStake",
    "EulerEstimate",
    "GeneratorConfig",
    "KernelParams",
    "LiquidStake",
    "PegModel",
    "PegState",
    "RegressionResult",
    "RiskAdjustedPeg",
    "YieldObservation",
    "estimate_peg_model",
    "euler_residual",
    "generate_equilibrium",
    "generate_frictional",
    "peg_premium",
    "read_panel",
    "risk_adjust",
    "run_efficiency_tests",
    "summary_stats",
    "write_panel",
]
