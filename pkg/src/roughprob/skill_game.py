"""Even-odds bets between two players who each think they are the stronger.

Win probability follows the logistic Bradley-Terry curve in the skill gap
``u = x_A - x_B``.  A game happens only when both players' noisy
self-assessments favour themselves: ``sigma_A * zeta_A < u < sigma_B * zeta_B``.
Averaging over a flat prior on ``u`` gives a rate of gain to A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import expit

from .core import (
    DEFAULT_SPEC, DomainError, MCEstimate, QuadratureSpec, RngStream, integrate, replicate,
)
from .core.special import normal_cdf, normal_sf

# |integrand| is below this beyond the truncation points
NEGLIGIBLE = 1e-12
_SQRT3 = math.sqrt(3.0)
# standard normal z with P(Z > z) = NEGLIGIBLE
_Z_TAIL = 7.034484


@dataclass(frozen=True)
class SkillPerception:
    sigma_A: float
    sigma_B: float
    zeta: str = "normal"  # or "uniform" (on +-sqrt(3), variance 1)

    def __post_init__(self):
        if self.sigma_A < 0 or self.sigma_B < 0:
            raise DomainError("error scales must be non-negative")
        if self.zeta not in ("normal", "uniform"):
            raise DomainError(f"unknown standardized distribution {self.zeta!r}")

    def swapped(self) -> "SkillPerception":
        return SkillPerception(self.sigma_B, self.sigma_A, self.zeta)


def logistic(u):
    return expit(u) if np.ndim(u) else float(expit(u))


def _prob_below(scale: float, zeta: str, u):
    """P(scale * zeta < u), with the half-and-half convention at a zero scale and u = 0."""
    u = np.asarray(u, dtype=float)
    if scale == 0:
        return np.where(u > 0, 1.0, np.where(u < 0, 0.0, 0.5))
    if zeta == "normal":
        return normal_cdf(u, scale)
    return np.clip((u / scale + _SQRT3) / (2 * _SQRT3), 0.0, 1.0)


def _prob_above(scale: float, zeta: str, u):
    u = np.asarray(u, dtype=float)
    if scale == 0:
        return np.where(u < 0, 1.0, np.where(u > 0, 0.0, 0.5))
    if zeta == "normal":
        return normal_sf(u, scale)
    return np.clip((_SQRT3 - u / scale) / (2 * _SQRT3), 0.0, 1.0)


def gain_at_gap(u, perc: SkillPerception):
    """Expected gain to A from an opponent at skill gap ``u`` (bet happens, then +-1)."""
    out = (_prob_below(perc.sigma_A, perc.zeta, u)
           * _prob_above(perc.sigma_B, perc.zeta, u)
           * np.tanh(u / 2))
    return float(out) if np.ndim(u) == 0 else out


def _reach(scale: float, zeta: str) -> float:
    """Beyond this |u| the willingness probability for this scale is below NEGLIGIBLE."""
    if zeta == "uniform":
        return _SQRT3 * scale
    return _Z_TAIL * scale


def expected_gain(perc: SkillPerception, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Rate of gain to A, integrating :func:`gain_at_gap` over all skill gaps.

    The game is zero-sum under a role swap, so the case sigma_A > sigma_B is
    computed as minus the swapped game; that keeps the antisymmetry exact in
    floating point rather than only up to quadrature rounding.
    """
    if perc.sigma_A == 0 and perc.sigma_B == 0:
        raise DomainError("at least one player must have a positive error scale")
    if perc.sigma_A > perc.sigma_B:
        return -expected_gain(perc.swapped(), spec)
    reach_A = _reach(perc.sigma_A, perc.zeta)
    reach_B = _reach(perc.sigma_B, perc.zeta)
    f = lambda u: gain_at_gap(u, perc)
    # the negative half is mirrored so both halves share nodes, making G(s, s) = 0 exactly
    return integrate(lambda u: f(-u), 0.0, reach_A, spec) + integrate(f, 0.0, reach_B, spec)


def expected_gain_mixture(sigma_A: float, sigma_B: Sequence[float], weights: Sequence[float],
                          zeta: str = "normal", spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Rate of gain to A against opponents whose error scale is itself random."""
    w = np.asarray(weights, dtype=float)
    if len(w) != len(sigma_B) or np.any(w < 0) or w.sum() <= 0:
        raise DomainError("weights must be non-negative, non-empty and match sigma_B")
    w = w / w.sum()
    return float(sum(wi * expected_gain(SkillPerception(sigma_A, sb, zeta), spec)
                     for wi, sb in zip(w, sigma_B)))


def _draw_zeta(rng, zeta: str, n: int) -> np.ndarray:
    if zeta == "normal":
        return rng.standard_normal(n)
    return rng.uniform(-_SQRT3, _SQRT3, n)


def simulate_match_rate(perc: SkillPerception, window_halfwidth: float = 20.0,
                        reps: int = 10**6, stream: RngStream = RngStream(0),
                        workers: int = 1) -> MCEstimate:
    """Monte Carlo rate of gain to A with the skill gap drawn uniformly from a window.

    Each replication draws the gap and both players' errors, plays (and
    settles at +-1 by a logistic coin) only if both are willing, and the
    average is scaled by the window length ``2W``.
    """
    W = window_halfwidth
    if not W > 0:
        raise DomainError("window half-width must be positive")
    need = max(_reach(perc.sigma_A, perc.zeta), _reach(perc.sigma_B, perc.zeta))
    if W < need:
        raise DomainError(f"window half-width {W} too small; integrand is not negligible up to {need:.3g}")

    def sampler(rng, n):
        u = rng.uniform(-W, W, n)
        za = _draw_zeta(rng, perc.zeta, n)
        zb = _draw_zeta(rng, perc.zeta, n)
        win = rng.random(n) < expit(u)
        play = (perc.sigma_A * za < u) & (perc.sigma_B * zb > u)
        return 2 * W * np.where(play, np.where(win, 1.0, -1.0), 0.0)

    return replicate(sampler, reps, stream, workers)
