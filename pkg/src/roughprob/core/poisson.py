"""Sampling the Poisson process with intensity exp(-x) on the real line.

Points are produced from the top down.  With Gamma_k the k-th arrival of a
unit-rate Poisson process on (0, inf), the points X_(k) = -log(Gamma_k) are
the decreasing order statistics of the process, X_(1) being Gumbel.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .random import as_generator


def sample_poisson_descending(stream, stop_gap: float) -> list[float]:
    """All points of one realization lying within ``stop_gap`` of the largest.

    Returns ``[X_(1), X_(2), ...]`` in decreasing order.  Generation stops at
    the first point more than ``stop_gap`` below X_(1), which is not returned.
    """
    if not stop_gap > 0:
        raise DomainError("stop_gap must be positive")
    rng = as_generator(stream)
    gamma = rng.standard_exponential()
    top = -np.log(gamma)
    # X_(1) - X_(k) > gap  <=>  Gamma_k > Gamma_1 * e^gap
    limit = gamma * np.exp(stop_gap)
    points = [float(top)]
    block = 64
    while True:
        arrivals = gamma + np.cumsum(rng.standard_exponential(block))
        inside = arrivals[arrivals <= limit]
        points.extend((-np.log(inside)).tolist())
        if inside.size < block:
            return points
        gamma = arrivals[-1]
        block *= 2


def poisson_top(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """The top ``k`` points of ``n`` independent realizations, shape (n, k), rows decreasing."""
    gammas = np.cumsum(rng.standard_exponential((n, k)), axis=1)
    return -np.log(gammas)
