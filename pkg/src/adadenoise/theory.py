"""Closed-form asymptotic predictions for overlays and test oracles.

All limit functions return 0 below their detection threshold (rather
than NaN), which keeps curves plottable and matches the vanishing-
overlap behavior of the sub-threshold regime.

`t` is the effective noise precision: the Fisher information for the
adaptive pipeline, the reciprocal noise variance for plain PCA.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .shrinkage import bulk_edge, inflated_sv

__all__ = [
    "overlap_limit",
    "factor_overlap_limits",
    "singular_value_limit",
    "error_limit",
    "minimax_limits",
    "Prediction",
    "predict",
]


def overlap_limit(sigma: float, t: float, gamma: float = 1.0) -> float:
    """Limit of the smallest singular value of the left-factor product.

    Zero when sigma^2 * t <= 1 (no recovery); above the threshold

        sqrt((1 - t^-2 sigma^-4) / (1 + min(g^1/2, g^-1/2) t^-1 sigma^-2)),

    increasing to 1 as sigma grows.  Symmetric in gamma <-> 1/gamma.
    """
    if not (sigma > 0 and t > 0):
        raise ValueError("sigma and t must be positive")
    snr = sigma * sigma * t
    if snr <= 1.0:
        return 0.0
    num = 1.0 - 1.0 / (snr * snr)
    # min(g^1/2, g^-1/2) via the canonical representative so that gamma
    # and 1/gamma give bit-identical results
    den = 1.0 + 1.0 / (math.sqrt(max(gamma, 1.0 / gamma)) * snr)
    return math.sqrt(num / den)


def factor_overlap_limits(sigma: float, gamma: float = 1.0) -> tuple[float, float]:
    """Pair of per-factor overlap limits at unit noise variance.

    Returns (0, 0) for sigma <= 1; above threshold the two components
    differ only in which square root of the aspect ratio enters the
    denominator, so g1 >= g2 iff gamma <= 1 (the factor living in the
    larger dimension is harder to estimate).  Their product is the limit
    of the product of the two top singular-vector inner products; the
    larger of the two is the row-factor overlap limit and the smaller
    the column-factor one.
    """
    if sigma <= 1.0:
        return (0.0, 0.0)
    num = 1.0 - sigma ** -4
    g1 = math.sqrt(num / (1.0 + math.sqrt(gamma) * sigma ** -2))
    g2 = math.sqrt(num / (1.0 + sigma ** -2 / math.sqrt(gamma)))
    return (g1, g2)


def singular_value_limit(sigma: float, gamma: float = 1.0) -> float:
    """Almost-sure limit of the observed scaled singular value."""
    return inflated_sv(sigma, gamma)


def error_limit(sigma1: float, t: float) -> float:
    """Scaled operator-norm error limit: min(sigma1, t^-1/2)."""
    if sigma1 < 0 or not (t > 0):
        raise ValueError("need sigma1 >= 0 and t > 0")
    return min(sigma1, 1.0 / math.sqrt(t))


def minimax_limits(gamma: float, fisher_info: float) -> tuple[float, float]:
    """Scaled minimax error constants (rank-constrained, unconstrained).

    In units of (m n)^{1/4}: max(g^1/4, g^-1/4) / sqrt(I) for the
    rank-constrained class and (g^1/4 + g^-1/4) / sqrt(I) without the
    rank constraint.
    """
    if not (fisher_info > 0):
        raise ValueError("fisher_info must be positive")
    root = math.sqrt(fisher_info)
    lo = max(gamma ** 0.25, gamma ** -0.25) / root
    return (lo, bulk_edge(gamma) / root)


@dataclass(frozen=True)
class Prediction:
    """Bundle of the closed-form limits at one (sigma, t, gamma) point."""

    sigma: float
    gamma: float
    t: float
    overlap: float
    error: float


def predict(sigma: float, t: float, gamma: float = 1.0) -> Prediction:
    return Prediction(sigma=sigma, gamma=gamma, t=t,
                      overlap=overlap_limit(sigma, t, gamma),
                      error=error_limit(sigma, t))
