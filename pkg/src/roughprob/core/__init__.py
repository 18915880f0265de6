"""Shared numerical machinery: special functions, quadrature, random streams."""

from .errors import ConvergenceError, DomainError
from .poisson import poisson_top, sample_poisson_descending
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate, integrate_vector
from .random import (
    CHUNK_SIZE,
    ErrorModel,
    MCEstimate,
    RngStream,
    as_generator,
    check_clamp,
    clamp_probability,
    replicate,
)
from .special import (
    gumbel_cdf,
    gumbel_pdf,
    normal_cdf,
    normal_partial_expectation,
    normal_pdf,
    normal_sf,
)

__all__ = [
    "CHUNK_SIZE", "ConvergenceError", "DEFAULT_SPEC", "DomainError", "ErrorModel",
    "MCEstimate", "QuadratureSpec", "RngStream", "as_generator", "check_clamp",
    "clamp_probability", "gumbel_cdf", "gumbel_pdf", "integrate", "normal_cdf",
    "integrate_vector", "normal_partial_expectation", "normal_pdf", "normal_sf", "poisson_top",
    "replicate", "sample_poisson_descending",
]
