"""A one-shot duel where each side misjudges the other's accuracy.

Hit probability at distance ``x`` is ``min(rho / x, 1)``.  With known
accuracies both fire at ``rho_A + rho_B``; a duelist who perceives the
opponent's accuracy as ``rho + xi`` fires at ``rho_A + rho_B + xi`` instead,
so the larger perceived error shoots first (and from further away).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import ndtri

from .core import (
    DomainError, ErrorModel, MCEstimate, QuadratureSpec, RngStream, integrate, replicate,
)
from .skill_game import logistic

DUEL_SPEC = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-13, max_subdivisions=4000)
# perceived accuracies must stay positive except with this probability
POSITIVITY_MASS = 1e-9


@dataclass(frozen=True)
class Duelist:
    rho: float
    opponent_noise: ErrorModel = field(default_factory=ErrorModel)
    own_rho_known: bool = True

    def __post_init__(self):
        if not self.rho > 1:
            raise DomainError("accuracy parameter rho must exceed 1")


def _check_rho(*rhos):
    for r in rhos:
        if not r > 1:
            raise DomainError(f"accuracy parameter must exceed 1, got {r!r}")


def hit_prob(rho, x):
    if np.any(np.asarray(x) <= 0):
        raise DomainError("distance must be positive")
    out = np.minimum(np.asarray(rho, dtype=float) / x, 1.0)
    return float(out) if out.ndim == 0 else out


def crossing_distance(rho_A: float, rho_B: float) -> float:
    _check_rho(rho_A, rho_B)
    return rho_A + rho_B


def crossing_distance_general(p_A: Callable[[float], float], p_B: Callable[[float], float],
                              lo: float, hi: float, tol: float = 1e-13) -> float:
    """Solve p_A(x) + p_B(x) = 1 by bisection for hit curves decreasing in distance.

    Requires the sum to be >= 1 at ``lo`` and <= 1 at ``hi``.
    """
    f = lambda x: p_A(x) + p_B(x) - 1.0
    if f(lo) < 0 or f(hi) > 0:
        raise DomainError("p_A + p_B - 1 does not change sign on [lo, hi]")
    while hi - lo > tol * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def win_prob_known(rho_A: float, rho_B: float) -> float:
    _check_rho(rho_A, rho_B)
    return rho_A / (rho_A + rho_B)


def to_log_skill(rho):
    """Map an accuracy parameter to the Bradley-Terry skill scale, where
    ``win_prob_known(a, b) == logistic(log a - log b)``."""
    return np.log(rho)


def duel_outcome_prob(rho_A, rho_B, xi_A, xi_B):
    """P(A wins) given both perception errors; ``xi_A >= xi_B`` means A fires first."""
    s = rho_A + rho_B
    xi_A = np.asarray(xi_A, dtype=float)
    xi_B = np.asarray(xi_B, dtype=float)
    if np.any(s + np.maximum(xi_A, xi_B) <= 0):
        raise DomainError("planned firing distance must be positive")
    with np.errstate(divide="ignore", invalid="ignore"):
        a_first = rho_A / (s + xi_A)
        b_first = 1.0 - rho_B / (s + xi_B)
    out = np.where(xi_A >= xi_B, a_first, b_first)
    return float(out) if out.ndim == 0 else out


def _check_noise(rho_A, rho_B, noise_A: ErrorModel, noise_B: ErrorModel):
    # A misjudges B's rho, B misjudges A's
    if noise_A.prob_below(-rho_B) >= POSITIVITY_MASS or noise_B.prob_below(-rho_A) >= POSITIVITY_MASS:
        raise DomainError("noise too large: perceived accuracies could become non-positive")


def _quadrature(rho_A, rho_B, noise_A: ErrorModel, noise_B: ErrorModel, spec) -> float:
    s = rho_A + rho_B
    a_first = lambda t: rho_A / (s + t)
    b_first = lambda t: 1.0 - rho_B / (s + t)
    if noise_A.scale == 0 and noise_B.scale == 0:
        return rho_A / s
    if noise_A.scale == 0:
        lo, hi = noise_B.support()
        tail = integrate(lambda t: noise_B.pdf(t) * b_first(t), max(lo, 0.0), hi, spec)
        return (1.0 - noise_B.prob_above(0.0)) * a_first(0.0) + tail
    if noise_B.scale == 0:
        lo, hi = noise_A.support()
        head = integrate(lambda t: noise_A.pdf(t) * a_first(t), max(lo, 0.0), hi, spec)
        return head + noise_A.prob_below(0.0) * b_first(0.0)

    def f(t):
        return (noise_A.pdf(t) * noise_B.cdf(t) * a_first(t)
                + noise_B.pdf(t) * noise_A.cdf(t) * b_first(t))

    la, ha = noise_A.support()
    lb, hb = noise_B.support()
    lo, hi = min(la, lb), max(ha, hb)
    kinks = tuple(p for p in (la, ha, lb, hb, 0.0) if lo < p < hi)
    return integrate(f, lo, hi, spec, points=kinks)


def _inverse_cdf(model: ErrorModel, u):
    if model.scale == 0:
        return np.zeros_like(u)
    if model.kind == "normal":
        return model.scale * ndtri(u)
    return model.scale * (2.0 * u - 1.0)


def simulate_win_prob(rho_A: float, rho_B: float, noise_A: ErrorModel, noise_B: ErrorModel,
                      reps: int = 10**6, stream: RngStream = RngStream(0),
                      workers: int = 1) -> MCEstimate:
    """Monte Carlo P(A wins) with exchange-antithetic pairs.

    Each replication uses two uniforms twice, once as (A's, B's) error and
    once with the roles exchanged, and reports the pair average.  Swapping
    the duelists therefore reuses exactly the same realizations, so the two
    estimates add up to one.
    """
    _check_rho(rho_A, rho_B)
    _check_noise(rho_A, rho_B, noise_A, noise_B)

    def sampler(rng, n):
        u1 = rng.random(n)
        u2 = rng.random(n)
        first = duel_outcome_prob(rho_A, rho_B, _inverse_cdf(noise_A, u1), _inverse_cdf(noise_B, u2))
        second = duel_outcome_prob(rho_A, rho_B, _inverse_cdf(noise_A, u2), _inverse_cdf(noise_B, u1))
        return 0.5 * (first + second)

    return replicate(sampler, reps, stream, workers)


def expected_win_prob(rho_A: float, rho_B: float, noise_A: ErrorModel, noise_B: ErrorModel,
                      method: str = "quadrature", reps: int = 10**6,
                      stream: RngStream = RngStream(0),
                      spec: QuadratureSpec = DUEL_SPEC) -> float:
    """P(A wins) averaged over both duelists' perception errors."""
    _check_rho(rho_A, rho_B)
    _check_noise(rho_A, rho_B, noise_A, noise_B)
    if method == "quadrature":
        key_A = (rho_A, noise_A.kind, noise_A.scale)
        key_B = (rho_B, noise_B.kind, noise_B.scale)
        if key_A == key_B:
            return 0.5  # exchangeable duelists
        if key_A > key_B:
            # P + (1 - P) rounds to exactly 1, so the complement identity holds bitwise
            return 1.0 - _quadrature(rho_B, rho_A, noise_B, noise_A, spec)
        return _quadrature(rho_A, rho_B, noise_A, noise_B, spec)
    if method == "montecarlo":
        return simulate_win_prob(rho_A, rho_B, noise_A, noise_B, reps, stream).mean
    raise DomainError(f"unknown method {method!r}")


__all__ = [
    "Duelist", "crossing_distance", "crossing_distance_general", "duel_outcome_prob",
    "expected_win_prob", "hit_prob", "logistic", "simulate_win_prob", "to_log_skill",
    "win_prob_known",
]
