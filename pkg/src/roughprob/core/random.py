"""Reproducible random streams, perception-error models and a replication driver.

Streams are keyed Philox generators (counter-based), so a given
``(seed, stream_id)`` pair gives the same numbers on every platform.  Monte
Carlo work is cut into fixed-size chunks, each with its own substream; the
chunk layout never depends on the worker count, which is what makes results
bit-identical however many threads run them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import special
from .errors import DomainError

_U64 = 1 << 64
CHUNK_SIZE = 1 << 16


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not (isinstance(v, (int, np.integer)) and 0 <= v < _U64):
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def generator(self, index: int | None = None) -> np.random.Generator:
        """Generator for the whole stream, or for substream ``index``."""
        key = () if index is None else (int(index),)
        ss = np.random.SeedSequence([int(self.seed), int(self.stream_id)], spawn_key=key)
        return np.random.Generator(np.random.Philox(ss))

    def child(self, stream_id: int) -> "RngStream":
        """An independent stream sharing this seed (used to decorrelate sub-experiments)."""
        mixed = (int(self.stream_id) * 0x9E3779B97F4A7C15 + int(stream_id) + 1) % _U64
        return RngStream(self.seed, mixed)


def as_generator(stream) -> np.random.Generator:
    if isinstance(stream, np.random.Generator):
        return stream
    return stream.generator()


@dataclass(frozen=True)
class ErrorModel:
    """Zero-mean perception noise: ``normal`` (scale = sd) or ``uniform`` (scale = half-width)."""

    kind: str = "normal"
    scale: float = 0.0

    def __post_init__(self):
        if self.kind not in ("normal", "uniform"):
            raise DomainError(f"unknown error model kind {self.kind!r}")
        if not self.scale >= 0:
            raise DomainError(f"error scale must be non-negative, got {self.scale!r}")

    @classmethod
    def normal(cls, sigma: float) -> "ErrorModel":
        return cls("normal", sigma)

    @classmethod
    def uniform_rms(cls, rms: float) -> "ErrorModel":
        """Uniform noise with the given root-mean-square size."""
        return cls("uniform", rms * math.sqrt(3.0))

    @property
    def variance(self) -> float:
        if self.kind == "normal":
            return self.scale ** 2
        return self.scale ** 2 / 3.0

    @property
    def rms(self) -> float:
        return math.sqrt(self.variance)

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.kind == "normal":
            return self.scale * rng.standard_normal(size)
        return rng.uniform(-self.scale, self.scale, size)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.scale == 0:
            out = (x >= 0).astype(float)
        elif self.kind == "normal":
            out = special.normal_cdf(x, self.scale)
        else:
            out = np.clip((x + self.scale) / (2 * self.scale), 0.0, 1.0)
        return float(out) if np.ndim(out) == 0 else out

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.scale == 0:
            raise DomainError("a zero-scale error model has no density")
        if self.kind == "normal":
            out = special.normal_pdf(x, self.scale)
        else:
            out = np.where(np.abs(x) <= self.scale, 0.5 / self.scale, 0.0)
        return float(out) if np.ndim(out) == 0 else out

    def support(self, mass: float = 1e-15) -> tuple[float, float]:
        """Interval holding all but ``mass`` of the probability."""
        if self.scale == 0:
            return 0.0, 0.0
        if self.kind == "uniform":
            return -self.scale, self.scale
        z = -_norm_ppf(mass / 2)
        return -z * self.scale, z * self.scale

    def prob_below(self, x: float) -> float:
        """P(xi < x)."""
        return float(self.cdf(x)) if self.scale > 0 else float(x > 0)

    def prob_above(self, x: float) -> float:
        """P(xi > x)."""
        if self.scale == 0:
            return float(x < 0)
        if self.kind == "normal":
            return float(special.normal_sf(x, self.scale))
        return 1.0 - float(self.cdf(x))


def _norm_ppf(p: float) -> float:
    from scipy.special import ndtri
    return float(ndtri(p))


def clamp_probability(p: float, noise: ErrorModel) -> float:
    """Probability that ``p + xi`` leaves [0, 1]."""
    return noise.prob_below(-p) + noise.prob_above(1.0 - p)


CLAMP_LIMIT = 1e-6


def check_clamp(p: float, noise: ErrorModel, what: str = "p_true") -> None:
    """Reject settings where noisy probabilities would need non-negligible clamping."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"{what}={p!r} is not a probability")
    q = clamp_probability(p, noise)
    if q >= CLAMP_LIMIT:
        raise DomainError(
            f"{what}={p} with {noise.kind} noise of scale {noise.scale} leaves [0, 1] "
            f"with probability {q:.3g} >= {CLAMP_LIMIT:g}; clamping would bias the estimate"
        )


@dataclass(frozen=True)
class MCEstimate:
    """Replication average and its standard error (arrays for multi-column samplers)."""

    mean: float | np.ndarray
    std_error: float | np.ndarray
    n: int

    def __iter__(self):
        yield self.mean
        yield self.std_error


def _chunk_stats(sampler, stream: RngStream, index: int, size: int):
    rng = stream.generator(index)
    x = np.asarray(sampler(rng, size), dtype=float)
    if x.shape[0] != size:
        raise ValueError("sampler returned the wrong number of replications")
    m = x.mean(axis=0)
    m2 = ((x - m) ** 2).sum(axis=0)
    return size, m, m2


def replicate(sampler: Callable[[np.random.Generator, int], np.ndarray],
              reps: int, stream: RngStream, workers: int = 1,
              chunk_size: int = CHUNK_SIZE) -> MCEstimate:
    """Run ``reps`` replications of ``sampler(rng, n) -> array (n,) or (n, k)``.

    Chunks are merged in index order with the pairwise mean/variance update,
    so the result does not depend on ``workers``.
    """
    if reps < 1:
        raise DomainError("reps must be at least 1")
    sizes = [chunk_size] * (reps // chunk_size)
    if reps % chunk_size:
        sizes.append(reps % chunk_size)
    jobs = list(enumerate(sizes))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda j: _chunk_stats(sampler, stream, j[0], j[1]), jobs))
    else:
        parts = [_chunk_stats(sampler, stream, i, s) for i, s in jobs]

    n, mean, m2 = parts[0]
    for nb, mb, m2b in parts[1:]:
        tot = n + nb
        d = mb - mean
        mean = mean + d * (nb / tot)
        m2 = m2 + m2b + d * d * (n * nb / tot)
        n = tot
    if n > 1:
        se = np.sqrt(m2 / (n - 1) / n)
    else:
        se = np.full_like(np.asarray(mean), np.nan)
    if np.ndim(mean) == 0:
        return MCEstimate(float(mean), float(se), n)
    return MCEstimate(np.asarray(mean), np.asarray(se), n)
