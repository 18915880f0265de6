"""Normal and Gumbel densities and distribution functions.

Everything here works on Python floats and on numpy arrays alike.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as _sp

from .errors import DomainError

SQRT2 = math.sqrt(2.0)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _check_sigma(sigma):
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma!r}")


def _maybe_scalar(x, out):
    if np.ndim(x) == 0:
        return float(out)
    return out


def normal_pdf(x, sigma=1.0):
    """Density of Normal(0, sigma^2) at ``x``."""
    _check_sigma(sigma)
    with np.errstate(over="ignore", invalid="ignore"):  # z*z -> inf gives the right answer, 0
        z = np.asarray(x, dtype=float) / sigma
        out = INV_SQRT_2PI / sigma * np.exp(-0.5 * z * z)
    # a subnormal sigma makes the prefactor inf; away from 0 the density is still 0
    return _maybe_scalar(x, np.where(np.isinf(z), 0.0, out))


def normal_cdf(x, sigma=1.0):
    """P(sigma * Z <= x) for standard normal Z.

    Uses the complementary error function on whichever side keeps the
    argument non-negative, so the far tails keep full relative accuracy.
    """
    _check_sigma(sigma)
    with np.errstate(over="ignore"):  # tiny sigma: z -> +-inf, erfc handles it
        z = np.asarray(x, dtype=float) / (sigma * SQRT2)
    return _maybe_scalar(x, 0.5 * _sp.erfc(-z))


def normal_sf(x, sigma=1.0):
    """Upper tail P(sigma * Z > x)."""
    _check_sigma(sigma)
    with np.errstate(over="ignore"):  # tiny sigma: z -> +-inf, erfc handles it
        z = np.asarray(x, dtype=float) / (sigma * SQRT2)
    return _maybe_scalar(x, 0.5 * _sp.erfc(z))


def normal_partial_expectation(a):
    """Integral of the standard normal upper tail from ``a`` to infinity.

    Equals E[(Z - a)^+] = phi(a) - a * (1 - Phi(a)).
    """
    a = np.asarray(a, dtype=float)
    out = INV_SQRT_2PI * np.exp(-0.5 * a * a) - a * 0.5 * _sp.erfc(a / SQRT2)
    return _maybe_scalar(a, out)


def gumbel_cdf(x):
    """G(x) = exp(-exp(-x))."""
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore"):
        out = np.exp(-np.exp(-x))
    return _maybe_scalar(x, out)


def gumbel_pdf(x):
    """g(x) = exp(-x) exp(-exp(-x)), the derivative of :func:`gumbel_cdf`."""
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        e = np.exp(-x)
        out = e * np.exp(-e)
    out = np.where(np.isfinite(out), out, 0.0)
    return _maybe_scalar(x, out)
