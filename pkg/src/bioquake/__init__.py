"""Reliability toolkit for biometric verification error rates."""

from bioquake.core import (
    AcceptanceRegion,
    CertaintyClass,
    DomainError,
    ErrorObservation,
    UncertaintyResult,
    acceptance_region,
    binomial_cdf,
    binomial_log_pmf,
    bioquake,
    bounds,
    classify,
)

__version__ = "1.0.0"

__all__ = [
    "AcceptanceRegion",
    "CertaintyClass",
    "DomainError",
    "ErrorObservation",
    "UncertaintyResult",
    "acceptance_region",
    "binomial_cdf",
    "binomial_log_pmf",
    "bioquake",
    "bounds",
    "classify",
    "__version__",
]
