"""Prediction tournaments scored by the Brier rule.

Stating probability q scores ``(1 - q)^2`` if the event happens and ``q^2``
if not; low totals win.  With true probabilities p the expected total is
``sum p(1-p) + sum (q-p)^2``, so score differences between contestants on
the same questions track differences in mean squared forecast error.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import DomainError, ErrorModel, MCEstimate, RngStream, replicate

FORECAST_CLAMP = (0.01, 0.99)


@dataclass(frozen=True)
class TournamentRecord:
    q: float
    p: float | None = None
    outcome: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise DomainError(f"forecast {self.q!r} is not a probability")
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise DomainError(f"true probability {self.p!r} is not a probability")
        if self.outcome not in (None, 0, 1):
            raise DomainError(f"outcome must be 0 or 1, got {self.outcome!r}")


@dataclass(frozen=True)
class ContestantModel:
    """A forecaster whose stated q is p + noise, optionally clamped into (0, 1)."""

    noise: ErrorModel
    clamp: bool = True

    @property
    def rms(self) -> float:
        return self.noise.rms

    @classmethod
    def normal(cls, rms: float, clamp: bool = True) -> "ContestantModel":
        return cls(ErrorModel.normal(rms), clamp)

    def forecast(self, rng, p: np.ndarray) -> np.ndarray:
        q = p + self.noise.sample(rng, p.shape)
        if self.clamp:
            q = np.clip(q, *FORECAST_CLAMP)
        return q


def brier_score(q, outcome):
    """Squared error of a probability forecast against a 0/1 outcome."""
    q = np.asarray(q, dtype=float)
    o = np.asarray(outcome)
    if np.any((q < 0) | (q > 1)):
        raise DomainError("forecasts must lie in [0, 1]")
    if np.any((o != 0) & (o != 1)):
        raise DomainError("outcomes must be 0 or 1")
    s = (o - q) ** 2
    return float(s) if s.ndim == 0 else s


def expected_score(records: Sequence[TournamentRecord]) -> float:
    if any(r.p is None for r in records):
        raise DomainError("every record needs its true probability")
    p = np.array([r.p for r in records])
    q = np.array([r.q for r in records])
    return float(np.sum(p * (1 - p)) + np.sum((q - p) ** 2))


def expected_score_enumerated(records: Sequence[TournamentRecord]) -> float:
    """Expected total score by summing over all 2^n outcome vectors (brute force, n <= 20)."""
    n = len(records)
    if n > 20:
        raise DomainError("enumeration is limited to 20 questions")
    total = []
    for outcomes in itertools.product((0, 1), repeat=n):
        prob = 1.0
        score = 0.0
        for r, o in zip(records, outcomes):
            prob *= r.p if o else 1.0 - r.p
            score += (o - r.q) ** 2
        total.append(prob * score)
    return math.fsum(total)


def rms_error(records: Sequence[TournamentRecord]) -> float:
    return math.sqrt(sum((r.q - r.p) ** 2 for r in records) / len(records))


def score_gap_identity(records_you: Sequence[TournamentRecord],
                       records_rival: Sequence[TournamentRecord]) -> tuple[float, float, float]:
    """Expected score difference (you minus rival) and both RMS errors.

    The difference equals ``n * (sigma_you^2 - sigma_rival^2)``; the check
    raises if the two sides disagree beyond rounding.
    """
    n = len(records_you)
    if n == 0 or n != len(records_rival):
        raise DomainError("both contestants must answer the same non-empty set of questions")
    for a, b in zip(records_you, records_rival):
        if a.p is None or a.p != b.p:
            raise DomainError("both contestants must face the same true probabilities")
    gap = expected_score(records_you) - expected_score(records_rival)
    s_you = rms_error(records_you)
    s_rival = rms_error(records_rival)
    via_rms = n * (s_you ** 2 - s_rival ** 2)
    if not math.isclose(gap, via_rms, rel_tol=1e-9, abs_tol=1e-12 * n):
        raise AssertionError(f"score gap {gap} differs from n*(sigma^2 - sigma_hat^2) = {via_rms}")
    return gap, s_you, s_rival


def uniform_p(lo: float = 0.2, hi: float = 0.8) -> Callable:
    def draw(rng, size):
        return rng.uniform(lo, hi, size)
    return draw


def simulate_tournament(n_questions: int, you: ContestantModel, rival: ContestantModel,
                        p_sampler: Callable = uniform_p(), reps: int = 10**5,
                        stream: RngStream = RngStream(0), workers: int = 1) -> MCEstimate:
    """Probability that ``you`` finish with the lower total (ties count half)."""
    if n_questions < 1:
        raise DomainError("need at least one question")

    def sampler(rng, n):
        p = p_sampler(rng, (n, n_questions))
        q_you = you.forecast(rng, p)
        q_rival = rival.forecast(rng, p)
        happened = rng.random((n, n_questions)) < p
        s_you = np.sum((happened - q_you) ** 2, axis=1)
        s_rival = np.sum((happened - q_rival) ** 2, axis=1)
        return np.where(s_you < s_rival, 1.0, np.where(s_you == s_rival, 0.5, 0.0))

    return replicate(sampler, reps, stream, workers)


def clamp_bias(model: ContestantModel, p_sampler: Callable = uniform_p(),
               reps: int = 10**5, stream: RngStream = RngStream(0)) -> tuple[float, float]:
    """Mean forecast bias and realized RMS error introduced by clamping."""
    rng = stream.generator()
    p = p_sampler(rng, reps)
    q = model.forecast(rng, p)
    return float(np.mean(q - p)), float(np.sqrt(np.mean((q - p) ** 2)))


def read_records(path: str | Path) -> list[TournamentRecord]:
    """Read ``q,outcome`` lines (optional header, ``#`` comments) into records."""
    records = []
    with open(path, newline="") as fh:
        rows = csv.reader(line for line in fh if line.strip() and not line.lstrip().startswith("#"))
        for i, row in enumerate(rows):
            if len(row) != 2:
                raise DomainError(f"line {i + 1}: expected 'q,outcome', got {row!r}")
            try:
                q = float(row[0])
                o = row[1].strip()
            except ValueError:
                if i == 0:
                    continue  # header
                raise DomainError(f"line {i + 1}: cannot parse {row!r}")
            if o not in ("0", "1"):
                raise DomainError(f"line {i + 1}: outcome must be 0 or 1, got {o!r}")
            records.append(TournamentRecord(q=q, outcome=int(o)))
    return records


def score_records(records: Iterable[TournamentRecord]) -> tuple[float, int]:
    """Total Brier score and number of resolved forecasts."""
    recs = [r for r in records if r.outcome is not None]
    return math.fsum(brier_score(r.q, r.outcome) for r in recs), len(recs)
