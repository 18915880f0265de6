"""Choosing the best item, and bidding for one, when values are misperceived.

True utilities are the points of the Poisson process with intensity
``exp(-x)``; each is perceived as ``x + xi`` with ``xi ~ Normal(0, sigma^2)``.

Simulation generates the true points from the top down and stops once the
expected number of not-yet-generated points whose perceived value could
still beat the running second-best perceived value drops below
``tail_tol``.  That count is bounded by

    exp(sigma^2/2 - c) * P(Normal(sigma^2, sigma^2) > c - x_last)

for threshold ``c`` and deepest generated point ``x_last``.  Since the pairs
(true, perceived) form a Poisson process, the perceived values are again
exponential-intensity points shifted up by ``sigma^2 / 2``, which gives the
closed forms in :func:`choice_cost_exact` and :func:`auction_gains_exact`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import ndtri

from .core import (
    DEFAULT_SPEC, ConvergenceError, DomainError, MCEstimate, QuadratureSpec, RngStream,
    integrate, integrate_vector, poisson_top, replicate,
)
from .core.special import gumbel_pdf, normal_cdf, normal_partial_expectation, normal_sf

TAIL_TOL = 1e-10
_ROW_BATCH = 4096
_MAX_BLOCK = 1 << 14


@dataclass(frozen=True)
class PerceivedItem:
    x_true: float
    y_perc: float

    @property
    def error(self) -> float:
        return self.y_perc - self.x_true


@dataclass(frozen=True)
class AuctionResult:
    winner_x: float
    winner_bid: float
    second_bid: float
    profit_sealed: float
    profit_vickrey: float


@dataclass(frozen=True)
class AuctionSummary:
    mean_sealed: float
    se_sealed: float
    mean_vickrey: float
    se_vickrey: float
    mean_gap: float
    se_gap: float
    n: int

    def __iter__(self):
        yield from (self.mean_sealed, self.se_sealed, self.mean_vickrey, self.se_vickrey)


def mean_top_gap() -> float:
    """E[X_(1) - X_(2)] for the exp(-x) process."""
    return 1.0


def top_gap_integral(spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """The same mean gap as the integral over x of P(exactly one point above x)."""
    return integrate(gumbel_pdf, -math.inf, math.inf, spec)


def simulate_top_gap(reps: int = 10**6, stream: RngStream = RngStream(0),
                     workers: int = 1) -> MCEstimate:
    return replicate(lambda rng, n: -np.diff(poisson_top(rng, n, 2), axis=1)[:, 0],
                     reps, stream, workers)


def choice_cost_exact(sigma: float) -> float:
    """Mean cost sigma^2 / 2 of picking the best-looking item."""
    _check_sigma(sigma)
    return sigma * sigma / 2


def auction_gains_exact(sigma: float) -> tuple[float, float]:
    """Mean winner profit (sealed bid, second price): (-sigma^2, 1 - sigma^2)."""
    _check_sigma(sigma)
    return -sigma * sigma, 1.0 - sigma * sigma


def _check_sigma(sigma):
    if not sigma >= 0:
        raise DomainError("sigma must be non-negative")


def run_auction(items: Sequence[PerceivedItem]) -> AuctionResult:
    """Settle one auction in which every agent bids their perceived value."""
    if len(items) < 2:
        raise DomainError("an auction needs at least two bidders")
    ranked = sorted(items, key=lambda it: it.y_perc, reverse=True)
    w, second = ranked[0], ranked[1]
    return AuctionResult(w.x_true, w.y_perc, second.y_perc,
                         w.x_true - w.y_perc, w.x_true - second.y_perc)


def _tail_count(sigma: float, threshold, x_last):
    """Upper bound on the expected number of points below ``x_last`` perceived above ``threshold``."""
    gap = threshold - x_last
    with np.errstate(over="ignore"):
        return np.exp(sigma * sigma / 2 - threshold) * normal_sf(gap - sigma * sigma, sigma)


def _initial_block(sigma: float, tail_tol: float) -> int:
    # depth below the top where the tail bound typically falls under tail_tol
    z = -ndtri(min(0.5, tail_tol * math.exp(-sigma * sigma / 2)))
    depth = max(1.0, sigma * z)
    return int(min(_MAX_BLOCK, max(8, math.ceil(1.3 * math.exp(depth)))))


def _merge_top2(m1, m2, w_idx_old, y):
    """Combine running top-two values with a new block; returns (m1, m2, from_block, arg)."""
    k = y.shape[1]
    if k >= 2:
        part = np.argpartition(-y, 1, axis=1)[:, :2]
    else:
        part = np.zeros((y.shape[0], 1), dtype=int)
    rows = np.arange(y.shape[0])
    b_first = part[:, 0]
    b1 = y[rows, b_first]
    if k >= 2:
        b_other = part[:, 1]
        b2 = y[rows, b_other]
        swap = b2 > b1
        b1, b2 = np.where(swap, b2, b1), np.where(swap, b1, b2)
        b_first = np.where(swap, b_other, b_first)
    else:
        b2 = np.full_like(b1, -np.inf)
    new_winner = b1 > m1
    n1 = np.where(new_winner, b1, m1)
    n2 = np.where(new_winner, np.maximum(m1, b2), np.maximum(m2, b1))
    return n1, n2, new_winner, b_first


def _simulate_rows(rng: np.random.Generator, n: int, sigma: float, tail_tol: float,
                   stop_gap: float | None):
    """Per realization: (top true value, chosen item's true value, its error, second-best perceived)."""
    if sigma == 0:
        x = poisson_top(rng, n, 2)
        return x[:, 0], x[:, 0], np.zeros(n), x[:, 1]

    gam = np.zeros(n)
    x_top = np.full(n, np.nan)
    m1 = np.full(n, -np.inf)
    m2 = np.full(n, -np.inf)
    xw = np.full(n, np.nan)
    xiw = np.full(n, np.nan)
    active = np.arange(n)
    k = _initial_block(sigma, tail_tol) if stop_gap is None else 64
    first = True
    while active.size:
        g = gam[active, None] + np.cumsum(rng.standard_exponential((active.size, k)), axis=1)
        x = -np.log(g)
        xi = sigma * rng.standard_normal((active.size, k))
        if first:
            x_top[:] = x[:, 0]
            first = False
        y = x + xi
        if stop_gap is not None:
            y = np.where(x >= x_top[active, None] - stop_gap, y, -np.inf)
        a1, a2, new_w, arg = _merge_top2(m1[active], m2[active], None, y)
        rows = np.arange(active.size)
        xw[active] = np.where(new_w, x[rows, arg], xw[active])
        xiw[active] = np.where(new_w, xi[rows, arg], xiw[active])
        m1[active], m2[active] = a1, a2
        gam[active] = g[:, -1]
        if stop_gap is None:
            done = _tail_count(sigma, a2, x[:, -1]) < tail_tol
        else:
            done = x[:, -1] < x_top[active] - stop_gap
        active = active[~done]
        k = min(2 * k, _MAX_BLOCK)
    return x_top, xw, xiw, m2


def _sampler(sigma, tail_tol, stop_gap, stat):
    def sample(rng, n):
        out = []
        for start in range(0, n, _ROW_BATCH):
            m = min(_ROW_BATCH, n - start)
            out.append(stat(*_simulate_rows(rng, m, sigma, tail_tol, stop_gap)))
        return np.concatenate(out)
    return sample


def simulate_choice_cost(sigma: float, reps: int = 10**6, stream: RngStream = RngStream(0),
                         tail_tol: float = TAIL_TOL, stop_gap: float | None = None,
                         workers: int = 1) -> MCEstimate:
    """Monte Carlo mean of X_(1) minus the true value of the best-looking item.

    By default the process is truncated adaptively (see module docstring);
    passing ``stop_gap`` instead keeps exactly the points within that
    distance of the top true value.
    """
    _check_sigma(sigma)

    def cost(x_top, xw, xiw, m2):
        c = x_top - xw
        if np.any(c < 0):
            raise AssertionError("chosen item beats the top true value")
        return c

    return replicate(_sampler(sigma, tail_tol, stop_gap, cost), reps, stream, workers)


def simulate_auction(sigma: float, reps: int = 10**6, stream: RngStream = RngStream(0),
                     tail_tol: float = TAIL_TOL, stop_gap: float | None = None,
                     workers: int = 1) -> AuctionSummary:
    """Monte Carlo mean winner profit under first-price and second-price rules."""
    _check_sigma(sigma)

    def profits(x_top, xw, xiw, m2):
        bid = xw + xiw
        if np.any(m2 > bid):
            raise AssertionError("winner does not hold the highest perceived value")
        return np.column_stack([-xiw, xw - m2, bid - m2])

    est = replicate(_sampler(sigma, tail_tol, stop_gap, profits), reps, stream, workers)
    m, se = est.mean, est.std_error
    return AuctionSummary(float(m[0]), float(se[0]), float(m[1]), float(se[1]),
                          float(m[2]), float(se[2]), est.n)


# ---------------------------------------------------------------------------
# the mean cost as an integral over (x_(1), x, y)


def _below_count(t, sigma):
    """exp(y) * E[# points below x_(1) perceived above y], as a function of t = y - x_(1).

    Closed form of the integral of e^{s} P(xi > s) over s > t.
    """
    s2 = sigma * sigma
    with np.errstate(over="ignore", invalid="ignore"):
        v = math.exp(s2 / 2) * normal_sf(t - s2, sigma) - np.exp(t) * normal_sf(t, sigma)
    return np.maximum(v, 0.0)


def choice_cost_integral(sigma: float, spec: QuadratureSpec = DEFAULT_SPEC,
                         mass_z: float = 8.0) -> float:
    """Mean choice cost from the triple integral over the top value, the threshold and y.

    For X_(1) = x1, the chosen item's true value lies below a threshold
    ``x`` exactly when the best perceived value among items at or below
    ``x`` beats the top item and everything in (x, x1).  Integrating that
    probability over ``x < x1`` gives the conditional mean cost.  The inner
    probabilities use the Poisson formulas in closed form.  Ranges in
    ``t = y - x1`` and ``s = x1 - x`` are cut where the Normal tails fall
    below ``mass_z`` standard deviations.
    """
    if not sigma > 0:
        raise DomainError("sigma must be positive for the integral form")
    s2 = sigma * sigma
    t_lo, t_hi = -mass_z * sigma, s2 + mass_z * sigma
    s_hi = t_hi - t_lo
    inner_spec = QuadratureSpec(spec.abs_tol / 16, spec.rel_tol / 16, spec.max_subdivisions)
    mid_spec = QuadratureSpec(spec.abs_tol / 4, spec.rel_tol / 4, spec.max_subdivisions)
    J_cache: dict = {}

    def inner(x1, s):
        # integral over t of the y-density term for each (x1, s) pair
        def f(t):
            key = t.tobytes()
            if key not in J_cache:
                J_cache[key] = _below_count(t, sigma)
            J = J_cache[key][:, None]
            y = x1[None, :] + t[:, None]
            with np.errstate(over="ignore", under="ignore", invalid="ignore"):
                no_better = np.exp(-np.exp(-y) * J)
                density = np.exp(s2 / 2 - y) * normal_sf(t[:, None] + s[None, :] - s2, sigma)
                out = normal_cdf(t, sigma)[:, None] * no_better * density
            return np.where(np.isfinite(out), out, 0.0)
        return integrate_vector(f, t_lo, t_hi, inner_spec, points=(0.0,))

    def middle(x1):
        def f(s):
            X1 = np.repeat(x1, s.size)
            S = np.tile(s, x1.size)
            return inner(X1, S).reshape(x1.size, s.size).T
        return integrate_vector(f, 0.0, s_hi, mid_spec)

    def outer(x1):
        x1 = np.asarray(x1, dtype=float)
        vals = np.zeros_like(x1)
        w = gumbel_pdf(x1)
        live = w > 1e-300
        if np.any(live):
            vals[live] = w[live] * middle(x1[live])
        return vals

    return integrate(outer, -math.inf, math.inf, spec)


def choice_cost_reduced(sigma: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """The same mean cost with the threshold and top-value integrals done in closed form.

    What remains is one integral over t = y - x_(1).
    """
    if not sigma > 0:
        raise DomainError("sigma must be positive for the integral form")
    s2 = sigma * sigma

    def f(t):
        t = np.asarray(t, dtype=float)
        J = _below_count(t, sigma)
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            et = np.exp(-t)
            v = (normal_cdf(t, sigma) * sigma * normal_partial_expectation((t - s2) / sigma)
                 * et / (1.0 + et * J) ** 2)
        return np.where(np.isfinite(v), v, 0.0)

    return math.exp(s2 / 2) * integrate(f, -math.inf, math.inf, spec, points=(0.0, s2))
