"""Two people bet at the midpoint of their perceived probabilities.

A buys ``kappa * (q_A - r)`` contracts at price ``r = (q_A + q_B) / 2`` (a
negative count means A sells), and each contract is worth ``p - r`` to A in
expectation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DomainError, ErrorModel, MCEstimate, RngStream, check_clamp, replicate
from .core.special import normal_cdf


def _check_prob(name, v):
    if not 0.0 <= v <= 1.0:
        raise DomainError(f"{name}={v!r} is not a probability")


@dataclass(frozen=True)
class TwoPersonBet:
    q_A: float
    q_B: float
    p_true: float
    kappa: float = 1.0

    def __post_init__(self):
        for name in ("q_A", "q_B", "p_true"):
            _check_prob(name, getattr(self, name))
        if not self.kappa > 0:
            raise DomainError("kappa must be positive")


def mid_price(q_A, q_B):
    return (q_A + q_B) / 2


def mean_gain_A(bet: TwoPersonBet) -> float:
    r = mid_price(bet.q_A, bet.q_B)
    return bet.kappa * (bet.q_A - r) * (bet.p_true - r)


def mean_gain_B(bet: TwoPersonBet) -> float:
    r = mid_price(bet.q_A, bet.q_B)
    return bet.kappa * (bet.q_B - r) * (bet.p_true - r)


def expected_gain_analytic(sigma_A: float, sigma_B: float, kappa: float = 1.0) -> float:
    """Expected gain to A when both perceptions are unbiased: kappa/4 (sigma_B^2 - sigma_A^2)."""
    if not kappa > 0:
        raise DomainError("kappa must be positive")
    if sigma_A < 0 or sigma_B < 0:
        raise DomainError("error scales must be non-negative")
    return kappa / 4 * (sigma_B ** 2 - sigma_A ** 2)


def _correlated_noise(rng, n, model_A: ErrorModel, model_B: ErrorModel, rho: float):
    """Draw (xi_A, xi_B) with the given marginals joined by a Gaussian copula."""
    z1 = rng.standard_normal(n)
    z2 = rng.standard_normal(n)
    zb = rho * z1 + np.sqrt(1.0 - rho * rho) * z2

    def marginal(model, z):
        if model.kind == "normal":
            return model.scale * z
        return model.scale * (2.0 * normal_cdf(z) - 1.0)

    return marginal(model_A, z1), marginal(model_B, zb)


def simulate_expected_gain(p_true: float, model_A: ErrorModel, model_B: ErrorModel,
                           kappa: float = 1.0, reps: int = 10**6,
                           stream: RngStream = RngStream(0), correlation: float = 0.0,
                           workers: int = 1) -> MCEstimate:
    """Monte Carlo estimate of A's expected gain with q = p_true + noise.

    ``correlation`` couples the two errors through a Gaussian copula; the
    analytic answer does not depend on it.
    """
    check_clamp(p_true, model_A, "p_true (A's noise)")
    check_clamp(p_true, model_B, "p_true (B's noise)")
    if not -1.0 <= correlation <= 1.0:
        raise DomainError("correlation must lie in [-1, 1]")
    if not kappa > 0:
        raise DomainError("kappa must be positive")

    def sampler(rng, n):
        xa, xb = _correlated_noise(rng, n, model_A, model_B, correlation)
        qa = np.clip(p_true + xa, 0.0, 1.0)
        qb = np.clip(p_true + xb, 0.0, 1.0)
        r = 0.5 * (qa + qb)
        return kappa * (qa - r) * (p_true - r)

    return replicate(sampler, reps, stream, workers)
