"""Two-state Markov model for the stETH/ETH log price ratio.

The ratio sits either at parity (log ratio 0) or at a discount of depth
``eta`` (log ratio ``-eta``). Pricing the de-peg indicator with a market
price of peg risk tilts the transition probabilities; the tilted chain
determines the peg premium a liquid staker must be paid.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

DEFAULT_DEPEG_THRESHOLD = math.log(0.995)
UNVISITED_STAY_PROB = 0.5


class PegState(enum.Enum):
    PARITY = "parity"
    DEPEG = "depeg"

    def log_ratio(self, model: "PegModel") -> float:
        return 0.0 if self is PegState.PARITY else -model.eta


def _check_prob(name: str, p: float) -> None:
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {p!r}")


@dataclass(frozen=True)
class PegModel:
    """Physical-measure peg dynamics.

    ``p_stay_parity`` is P(parity -> parity), ``p_stay_depeg`` is
    P(depeg -> depeg), and ``eta`` is the de-peg depth in log units.
    """

    eta: float
    p_stay_parity: float
    p_stay_depeg: float

    def __post_init__(self):
        if not (math.isfinite(self.eta) and self.eta > 0):
            raise ValueError(f"eta must be a positive finite number, got {self.eta!r}")
        _check_prob("p_stay_parity", self.p_stay_parity)
        _check_prob("p_stay_depeg", self.p_stay_depeg)

    def prob_depeg_next(self, state: PegState) -> float:
        """P(next state is DEPEG | current state)."""
        if state is PegState.PARITY:
            return 1.0 - self.p_stay_parity
        return self.p_stay_depeg

    def classify(self, log_ratio: float, threshold: float | None = None) -> PegState:
        """Map an observed log ratio onto a chain state (default cut at -eta/2)."""
        cut = -self.eta / 2 if threshold is None else threshold
        return PegState.DEPEG if log_ratio <= cut else PegState.PARITY


@dataclass(frozen=True)
class RiskAdjustedPeg:
    p_stay_parity_tilde: float
    p_stay_depeg_tilde: float


@dataclass(frozen=True)
class PegEstimate:
    """Calibrated model plus the raw transition counts behind it.

    ``low_confidence`` names every parameter that fell back to a default
    because the corresponding state was never left from.
    """

    model: PegModel
    counts: dict = field(default_factory=dict)
    low_confidence: tuple[str, ...] = ()


def risk_adjust(model: PegModel, lambda_chi: float) -> RiskAdjustedPeg:
    """Transition probabilities under the kernel-implied measure."""
    if not math.isfinite(lambda_chi):
        raise ValueError(f"lambda_chi must be finite, got {lambda_chi!r}")
    w = math.exp(-lambda_chi)
    p00 = model.p_stay_parity
    pee = model.p_stay_depeg
    p00_t = p00 / (p00 + (1.0 - p00) * w)
    pee_t = pee * w / (pee * w + (1.0 - pee))
    return RiskAdjustedPeg(p00_t, pee_t)


def peg_premium(state: PegState, model: PegModel, adjusted: RiskAdjustedPeg) -> float:
    """Per-period peg premium: non-negative at parity, non-positive in de-peg."""
    eta = model.eta
    if state is PegState.PARITY:
        # -log(e^-eta + p(1 - e^-eta)); -expm1(-eta) keeps precision for tiny eta
        one_minus = -math.expm1(-eta)
        return -math.log1p(-(1.0 - adjusted.p_stay_parity_tilde) * one_minus)
    # -log(e^eta - p(e^eta - 1)) = -eta - log(1 - p(1 - e^-eta))
    one_minus = -math.expm1(-eta)
    return -eta - math.log1p(-adjusted.p_stay_depeg_tilde * one_minus)


def premium_for(state: PegState, model: PegModel, lambda_chi: float) -> float:
    return peg_premium(state, model, risk_adjust(model, lambda_chi))


def certainty_factor(state: PegState, model: PegModel, lambda_chi: float) -> float:
    """E[exp(chi_next - lambda_chi * omega + xi) | state] by enumerating both outcomes.

    Kept free of the closed-form premium so it can serve as its check.
    """
    if not math.isfinite(lambda_chi):
        raise ValueError(f"lambda_chi must be finite, got {lambda_chi!r}")
    q = model.prob_depeg_next(state)
    outcomes = ((1.0 - q, 0.0, 0.0), (q, -model.eta, 1.0))
    norm = sum(p * math.exp(-lambda_chi * omega) for p, _, omega in outcomes)
    xi = -math.log(norm)
    return sum(p * math.exp(chi - lambda_chi * omega + xi) for p, chi, omega in outcomes)


def simulate_peg_path(
    model: PegModel, start: PegState, horizon: int, seed: int
) -> list[PegState]:
    """Sample ``horizon`` consecutive states, the first being ``start``."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1; an empty path is not a path")
    rng = np.random.default_rng(seed)
    u = rng.random(horizon - 1).tolist()
    q_from_parity = 1.0 - model.p_stay_parity
    q_from_depeg = model.p_stay_depeg
    depeg = start is PegState.DEPEG
    path = [start]
    for ui in u:
        depeg = ui < (q_from_depeg if depeg else q_from_parity)
        path.append(PegState.DEPEG if depeg else PegState.PARITY)
    return path


def estimate_peg_model(
    log_ratios: Sequence[float], depeg_threshold: float = DEFAULT_DEPEG_THRESHOLD
) -> PegEstimate:
    """Calibrate a PegModel by classifying observations and counting transitions.

    Observations at or below ``depeg_threshold`` are de-peg days; ``eta`` is
    the absolute mean of their log ratios (``|depeg_threshold|`` if there are
    none). Stay probabilities are maximum-likelihood transition frequencies.
    """
    chi = np.asarray(log_ratios, dtype=float)
    if chi.ndim != 1 or chi.size < 2:
        raise ValueError("need at least two observations to count transitions")
    if not depeg_threshold < 0:
        raise ValueError("depeg_threshold must be negative")
    is_depeg = chi <= depeg_threshold
    prev, nxt = is_depeg[:-1], is_depeg[1:]
    counts = {
        "parity_parity": int(np.sum(~prev & ~nxt)),
        "parity_depeg": int(np.sum(~prev & nxt)),
        "depeg_depeg": int(np.sum(prev & nxt)),
        "depeg_parity": int(np.sum(prev & ~nxt)),
    }
    flags = []
    n_from_parity = counts["parity_parity"] + counts["parity_depeg"]
    n_from_depeg = counts["depeg_depeg"] + counts["depeg_parity"]
    if n_from_parity:
        p00 = counts["parity_parity"] / n_from_parity
    else:
        p00 = UNVISITED_STAY_PROB
        flags.append("p_stay_parity")
    if n_from_depeg:
        pee = counts["depeg_depeg"] / n_from_depeg
    else:
        pee = UNVISITED_STAY_PROB
        flags.append("p_stay_depeg")
    if is_depeg.any():
        eta = float(abs(chi[is_depeg].mean()))
    else:
        eta = abs(depeg_threshold)
        flags.append("eta")
    return PegEstimate(PegModel(eta, p00, pee), counts, tuple(flags))
