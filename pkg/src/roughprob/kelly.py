"""Kelly betting at even odds on events of probability 0.5 + delta.

All growth rates use the small-delta, small-stake approximation
``2 a delta - a^2 / 2``.  The bettor stakes ``max(0, 2 delta_perc)`` with
``delta_perc = delta_true + xi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import DomainError, MCEstimate, RngStream, replicate
from .core.special import normal_cdf, normal_pdf


@dataclass(frozen=True)
class KellySetting:
    delta_true: float
    sigma: float = 0.0

    def __post_init__(self):
        if abs(self.delta_true) > 0.25:
            raise DomainError("|delta_true| must be at most 0.25 for the first-order approximation")
        if not self.sigma >= 0:
            raise DomainError("sigma must be non-negative")


def growth_rate(a, delta):
    if np.any(np.asarray(a) < 0) or np.any(np.asarray(a) > 1):
        raise DomainError("stake fraction must lie in [0, 1]")
    return 2 * a * delta - a * a / 2


def optimal_fraction(delta_perc):
    if np.ndim(delta_perc):
        return np.maximum(0.0, 2 * np.asarray(delta_perc))
    return max(0.0, 2 * delta_perc)


def s_tail(y: float) -> float:
    """E[Z^2; Z > y] for standard normal Z."""
    if y == -math.inf:
        return 1.0
    if y == math.inf:
        return 0.0
    return y * normal_pdf(y) + normal_cdf(-y)


def expected_growth(setting: KellySetting) -> float:
    """Mean growth rate when the stake is chosen from a Normal(0, sigma^2)-perturbed edge."""
    d, s = setting.delta_true, setting.sigma
    if s == 0:
        return 2 * d * d if d > 0 else 0.0
    z = d / s
    return 2 * (d * d - s * s) * normal_cdf(z) + 2 * s * d * normal_pdf(z)


def simulate_expected_growth(setting: KellySetting, reps: int = 10**6,
                             stream: RngStream = RngStream(0), workers: int = 1) -> MCEstimate:
    """Average of the piecewise growth 2(delta^2 - xi^2) on {xi > -delta}, else 0."""
    d, s = setting.delta_true, setting.sigma

    def sampler(rng, n):
        xi = s * rng.standard_normal(n)
        return np.where(xi > -d, 2 * (d * d - xi * xi), 0.0)

    return replicate(sampler, reps, stream, workers)


def simulate_policy_growth(policy: Callable[[np.ndarray], np.ndarray], setting: KellySetting,
                           reps: int = 10**6, stream: RngStream = RngStream(0),
                           workers: int = 1) -> MCEstimate:
    """Mean growth of an arbitrary stake rule ``a = policy(delta_perc)`` (clipped to [0, 1]).

    A hook for trying error-aware stake rules; with ``policy=optimal_fraction``
    it reproduces :func:`simulate_expected_growth`.
    """
    d, s = setting.delta_true, setting.sigma

    def sampler(rng, n):
        perc = d + s * rng.standard_normal(n)
        a = np.clip(np.asarray(policy(perc), dtype=float), 0.0, 1.0)
        return growth_rate(a, d)

    return replicate(sampler, reps, stream, workers)
