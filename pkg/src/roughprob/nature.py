"""A two-action decision against nature: an outdoor or an indoor venue.

Utilities: outdoor (A) gives ``a`` without rain and ``b`` with rain, indoor
(B) gives ``c`` and ``d``.  Rain has probability p.  Acting on a misjudged p
costs ``|p_true - p_crit| * z`` whenever p_true and p_perc fall on opposite
sides of the break-even probability.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import DomainError, ErrorModel, MCEstimate, RngStream, check_clamp, replicate


@dataclass(frozen=True)
class UtilityQuad:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not (self.a > self.c and self.d > self.b):
            raise DomainError("need a > c and d > b (each venue best in its own weather)")

    @property
    def z(self) -> float:
        return self.a - self.b - self.c + self.d

    def utility_A(self, p):
        return p * self.b + (1 - p) * self.a

    def utility_B(self, p):
        return p * self.d + (1 - p) * self.c


def p_crit(theta: UtilityQuad) -> float:
    up = theta.a - theta.c
    return up / (up + theta.d - theta.b)


def choose(p, theta: UtilityQuad):
    """'A' below the critical probability (and at it), 'B' above."""
    return np.where(np.asarray(p) <= p_crit(theta), "A", "B")


def decision_cost(p_true, p_perc, theta: UtilityQuad):
    pc = p_crit(theta)
    p_true = np.asarray(p_true, dtype=float)
    p_perc = np.asarray(p_perc, dtype=float)
    # a perceived value exactly at p_crit picks A, as in choose()
    wrong = ((p_true < pc) & (p_perc > pc)) | ((p_true > pc) & (p_perc <= pc))
    out = np.where(wrong, np.abs(p_true - pc) * theta.z, 0.0)
    return float(out) if out.ndim == 0 else out


def utility_gap(p_true: float, p_perc: float, theta: UtilityQuad) -> float:
    """Best achievable expected utility minus that of the action chosen from p_perc."""
    ua, ub = theta.utility_A(p_true), theta.utility_B(p_true)
    got = ua if choose(p_perc, theta) == "A" else ub
    return max(ua, ub) - got


def expected_cost(p_true: float | Callable, noise: ErrorModel, theta: UtilityQuad,
                  reps: int = 10**6, stream: RngStream = RngStream(0),
                  workers: int = 1) -> MCEstimate:
    """Monte Carlo mean cost with ``p_perc = p_true + xi``.

    ``p_true`` may be a fixed probability or a sampler ``(rng, n) -> array``
    drawing it afresh each replication.  Perceived probabilities are clamped
    to [0, 1]; fixed values that would need clamping with probability
    >= 1e-6 are rejected.
    """
    if callable(p_true):
        draw = p_true
    else:
        check_clamp(p_true, noise)
        draw = lambda rng, n: np.full(n, float(p_true))

    def sampler(rng, n):
        p = draw(rng, n)
        perc = np.clip(p + noise.sample(rng, n), 0.0, 1.0)
        return decision_cost(p, perc, theta)

    return replicate(sampler, reps, stream, workers)


def expected_cost_fixed(p_true: float, noise: ErrorModel, theta: UtilityQuad) -> float:
    """Exact mean cost for a fixed p_true: cost times the chance the error crosses p_crit."""
    pc = p_crit(theta)
    g = p_true - pc
    if g == 0:
        return 0.0
    cross = noise.prob_below(-g) if g > 0 else noise.prob_above(-g)
    return abs(g) * theta.z * cross


def uniform_p_true(lo: float, hi: float) -> Callable:
    if not 0 <= lo < hi <= 1:
        raise DomainError("need 0 <= lo < hi <= 1")
    return lambda rng, n: rng.uniform(lo, hi, n)
