"""A monopoly bookmaker choosing a bid/ask interval.

Gamblers' perceived probabilities are uniform on ``[p_gamb - L, p_gamb + L]``.
A gambler above the ask ``x2`` buys ``kappa * (p_perc - x2)`` contracts, one
below the bid ``x1`` sells ``kappa * (x1 - p_perc)``, and the bookmaker earns
``x2 - p_true`` or ``p_true - x1`` per contract in expectation.

The noisy-bookmaker results are expressed in units where ``L = 1`` and
``kappa = 1``: ``u = sigma^2 / L^2`` is the squared relative error and
``r = (p_gamb - p_true) / L`` the gamblers' relative bias.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .core import (
    DEFAULT_SPEC, DomainError, MCEstimate, QuadratureSpec, RngStream, integrate, replicate,
)
from .core.special import normal_pdf

H_SPEC = QuadratureSpec(abs_tol=1e-10, rel_tol=1e-10, max_subdivisions=2000)


@dataclass(frozen=True)
class GamblerPopulation:
    p_gamb: float
    L: float
    kappa: float = 1.0

    def __post_init__(self):
        if not self.L > 0:
            raise DomainError("L must be positive")
        if not self.kappa > 0:
            raise DomainError("kappa must be positive")
        if self.p_gamb - self.L < -1e-12 or self.p_gamb + self.L > 1 + 1e-12:
            raise DomainError("gambler interval [p_gamb - L, p_gamb + L] must lie in [0, 1]")

    @property
    def lo(self) -> float:
        return self.p_gamb - self.L

    @property
    def hi(self) -> float:
        return self.p_gamb + self.L

    # Subclasses may override these two to model other distributions of
    # perceived probability; everything else goes through them.
    def buy_volume(self, x2):
        """E[(P - x2)^+] for a gambler's perceived probability P."""
        return _uniform_buy(x2, self.lo, self.hi)

    def sell_volume(self, x1):
        """E[(x1 - P)^+]."""
        return _uniform_sell(x1, self.lo, self.hi)

    def sample(self, rng, n):
        return rng.uniform(self.lo, self.hi, n)


@dataclass(frozen=True)
class SpreadInterval:
    x1: float
    x2: float

    def __post_init__(self):
        if self.x1 > self.x2:
            raise DomainError(f"bid {self.x1} exceeds ask {self.x2}")

    @property
    def width(self) -> float:
        return self.x2 - self.x1


@dataclass(frozen=True)
class BookmakerBelief:
    p_book: float
    sigma: float = 0.0

    def __post_init__(self):
        if not self.sigma >= 0:
            raise DomainError("sigma must be non-negative")


class Policy(enum.Enum):
    KNOWN_P = "known-p"
    SYMMETRIC_CONSENSUS = "symmetric"
    NOISY_YSTAR = "noisy"


def _uniform_buy(x2, lo, hi):
    a = np.maximum(x2, lo)
    v = np.where(a < hi, ((hi - x2) ** 2 - (a - x2) ** 2) / (2 * (hi - lo)), 0.0)
    return float(v) if np.ndim(v) == 0 else v


def _uniform_sell(x1, lo, hi):
    b = np.minimum(x1, hi)
    v = np.where(b > lo, ((x1 - lo) ** 2 - (x1 - b) ** 2) / (2 * (hi - lo)), 0.0)
    return float(v) if np.ndim(v) == 0 else v


def _raw_gain(x1, x2, p, pg, L, kappa=1.0, clipped=True):
    """Bookmaker's mean gain on plain floats/arrays.

    ``clipped=False`` evaluates the two-term formula as if the interval sat
    inside the gambler range, which is only meaningful when it does.
    """
    lo, hi = pg - L, pg + L
    if clipped:
        buy = _uniform_buy(x2, lo, hi)
        sell = _uniform_sell(x1, lo, hi)
    else:
        buy = (hi - x2) ** 2 / (4 * L)
        sell = (x1 - lo) ** 2 / (4 * L)
    return kappa * ((x2 - p) * buy + (p - x1) * sell)


def mean_gain(spread: SpreadInterval, p_true: float, pop: GamblerPopulation) -> float:
    """Bookmaker's mean gain; gamblers outside the interval's reach simply do not trade."""
    return pop.kappa * ((spread.x2 - p_true) * pop.buy_volume(spread.x2)
                        + (p_true - spread.x1) * pop.sell_volume(spread.x1))


def optimal_spread_known_p(p_true: float, pop: GamblerPopulation) -> SpreadInterval:
    if not pop.lo <= p_true <= pop.hi:
        raise DomainError("p_true must lie inside the gamblers' range for this interval")
    return SpreadInterval(2 / 3 * p_true + pop.lo / 3, 2 / 3 * p_true + pop.hi / 3)


def gain_known_p(delta: float, L: float, kappa: float = 1.0) -> float:
    """Profit of the known-p optimum: 2 kappa/27 (L^2 + 3 delta^2), delta = p_gamb - p_true."""
    if not L > 0:
        raise DomainError("L must be positive")
    if abs(delta) > L * (1 + 1e-12):
        raise DomainError("|delta| must not exceed L")
    return 2 * kappa / 27 * (L * L + 3 * delta * delta)


def optimal_symmetric(pop: GamblerPopulation) -> tuple[float, float]:
    """Best half-width for an interval centred on the consensus, and its gain."""
    return pop.L / 3, 2 * pop.kappa / 27 * pop.L ** 2


def maximize_spread_numeric(p_true: float, pop: GamblerPopulation,
                            start: SpreadInterval | None = None) -> SpreadInterval:
    """Maximize :func:`mean_gain` over (x1, x2) with Nelder-Mead."""
    scale = pop.kappa * pop.L ** 2
    if start is None:
        start = SpreadInterval(pop.p_gamb - pop.L / 2, pop.p_gamb + pop.L / 2)

    def neg(v):
        x1, x2 = v
        return -_raw_gain(x1, x2, p_true, pop.p_gamb, pop.L, pop.kappa) / scale

    res = optimize.minimize(neg, [start.x1, start.x2], method="Nelder-Mead",
                            options={"xatol": 1e-11, "fatol": 1e-15, "maxiter": 20000})
    x1, x2 = res.x
    return SpreadInterval(min(x1, x2), max(x1, x2))


def eq7_objective(y, sigma: float, L: float):
    """Expected buy-side term y(L-y)^2 + (3y - 2L) sigma^2 at half-width y."""
    return y * (L - y) ** 2 + (3 * y - 2 * L) * sigma ** 2


def y_star(sigma: float, L: float) -> float:
    """Half-width the noisy bookmaker should use around its own estimate.

    For ``sigma > L/3`` the stationarity condition has no real root and the
    interval is widened to cover every gambler (``L``), which means no trades.
    """
    if sigma < 0:
        raise DomainError("sigma must be non-negative")
    if not L > 0:
        raise DomainError("L must be positive")
    if 3 * sigma > L * (1 + 1e-12):
        return L
    return L / 3 * (2 - math.sqrt(max(0.0, 1 - 9 * sigma * sigma / (L * L))))


def h(u: float) -> float:
    """Normalized gain (1 + (1 - 9u)^{3/2}) / 27 of the noisy bookmaker with unbiased gamblers."""
    if u < 0:
        raise DomainError("u must be non-negative")
    if u > 1 / 9 * (1 + 1e-12):
        raise DomainError("h(u) is only defined for u <= 1/9; use simulate_bookmaker beyond that")
    return (1 + max(0.0, 1 - 9 * u) ** 1.5) / 27


def expected_gain_noisy_book(sigma: float, pop: GamblerPopulation) -> float:
    return pop.kappa * h(sigma ** 2 / pop.L ** 2) * pop.L ** 2


def h_star_second_order(u: float, r: float) -> float:
    """Closed form of the unclipped expectation, which keeps only even powers of the error."""
    _check_u(u)
    y = y_star(math.sqrt(u), 1.0)
    a = 1 + r - y
    b = 1 - r - y
    return 0.25 * (y * (a * a + b * b) + (2 * y - 2 * (a + b)) * u)


def _check_u(u):
    if u < 0:
        raise DomainError("u must be non-negative")
    if u > 1 / 9 * (1 + 1e-12):
        raise DomainError("the noisy-bookmaker interval is only defined for u <= 1/9")


def h_star(u: float, r: float, clipped: bool = False,
           spec: QuadratureSpec = H_SPEC) -> float:
    """Normalized gain when the bookmaker uses [p_book - y*, p_book + y*] and gamblers are biased by r.

    The expectation over Normal(0, u) bookmaker error is computed by
    quadrature.  With ``clipped=False`` the two-term gain formula is used as
    written (interval assumed inside the gamblers' range); with
    ``clipped=True`` gamblers who do not exist are not counted, which lowers
    the value slightly once the error can push the interval past the range.
    """
    _check_u(u)
    y = y_star(math.sqrt(u), 1.0)
    if u == 0:
        return float(_raw_gain(-y, y, 0.0, r, 1.0, clipped=clipped))
    s = math.sqrt(u)

    def f(xi):
        return _raw_gain(xi - y, xi + y, 0.0, r, 1.0, clipped=clipped) * normal_pdf(xi, s)

    kinks = (r + 1 - y, r - 1 - y, r - 1 + y, r + 1 + y) if clipped else ()
    return integrate(f, -math.inf, math.inf, spec, points=kinks + (0.0,))


def optimal_noisy_spread_numeric(u: float, r: float,
                                 spec: QuadratureSpec = DEFAULT_SPEC) -> tuple[float, float, float]:
    """Numerically best offsets (below, above) around p_book when both error and bias are present.

    Returns ``(a, b, gain)`` for the interval ``[p_book - a, p_book + b]`` in
    normalized units, maximizing the clipped expected gain.  No closed form is
    known for this case.
    """
    if u < 0:
        raise DomainError("u must be non-negative")
    s = math.sqrt(u)

    def expected(a, b):
        if s == 0:
            return _raw_gain(-a, b, 0.0, r, 1.0)
        f = lambda xi: _raw_gain(xi - a, xi + b, 0.0, r, 1.0) * normal_pdf(xi, s)
        kinks = (r + 1 - b, r - 1 - b, r - 1 + a, r + 1 + a, 0.0)
        return integrate(f, -math.inf, math.inf, spec, points=kinks)

    y0 = y_star(s, 1.0)
    res = optimize.minimize(lambda v: -expected(*v), [y0, y0], method="Nelder-Mead",
                            options={"xatol": 1e-7, "fatol": 1e-12, "maxiter": 4000})
    a, b = res.x
    return float(a), float(b), float(-res.fun)


def policy_interval(policy: Policy, p_true: float, pop: GamblerPopulation,
                    sigma: float = 0.0, p_book=None):
    """Interval a bookmaker following ``policy`` would post (vectorized over ``p_book``)."""
    if policy is Policy.KNOWN_P:
        s = optimal_spread_known_p(p_true, pop)
        return s.x1, s.x2
    if policy is Policy.SYMMETRIC_CONSENSUS:
        w, _ = optimal_symmetric(pop)
        return pop.p_gamb - w, pop.p_gamb + w
    y = y_star(sigma, pop.L)
    centre = p_true if p_book is None else p_book
    return centre - y, centre + y


def simulate_bookmaker(p_true: float, pop: GamblerPopulation, belief: BookmakerBelief,
                       policy: Policy, reps: int = 10**6, stream: RngStream = RngStream(0),
                       workers: int = 1) -> MCEstimate:
    """Monte Carlo of the bookmaker's mean gain per unit of aggregate affluence.

    Each replication draws one gambler (and, for the noisy policy, one
    bookmaker error of size ``belief.sigma``) and settles the trade at its
    expected value, ``x2 - p_true`` or ``p_true - x1`` per contract.
    """
    policy = Policy(policy)
    if policy is Policy.KNOWN_P:
        optimal_spread_known_p(p_true, pop)  # validates p_true

    def sampler(rng, n):
        if policy is Policy.NOISY_YSTAR:
            p_book = p_true + belief.sigma * rng.standard_normal(n)
            x1, x2 = policy_interval(policy, p_true, pop, belief.sigma, p_book)
        else:
            x1, x2 = policy_interval(policy, p_true, pop)
        g = pop.sample(rng, n)
        bought = np.maximum(g - x2, 0.0)
        sold = np.maximum(x1 - g, 0.0)
        return pop.kappa * (bought * (x2 - p_true) + sold * (p_true - x1))

    return replicate(sampler, reps, stream, workers)
