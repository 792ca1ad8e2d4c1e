"""Spectral maps for singular value debiasing and thresholding.

In the spiked model with unit-variance noise, a planted scaled singular
value ``sigma >= 1`` is observed inflated to

    inflated_sv(sigma) = sqrt((sigma + g^-1/2 / sigma) (sigma + g^1/2 / sigma)),

where ``g`` is the row/column aspect ratio; below 1 the spike is lost in
the bulk whose edge sits at ``bulk_edge(g) = g^1/4 + g^-1/4``.  The
closed-form inverse undoes the inflation.  The shrink rules rescale by
the effective noise level first, so one pair of maps serves both the
adaptive pipeline (noise level estimated via Fisher information) and the
known-variance baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, op_norm

__all__ = [
    "bulk_edge",
    "inflated_sv",
    "debiased_sv",
    "shrink_adaptive",
    "shrink_known_sd",
    "PerturbationCheck",
    "check_spectral_map_perturbation",
]


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not (gamma > 0 and math.isfinite(gamma)):
        raise ValueError("aspect ratio must be positive and finite")
    return gamma


def _root_gamma(gamma: float) -> float:
    # gamma and 1/gamma must give bit-identical results, so canonicalize
    # to the representative >= 1 before taking the root.
    return math.sqrt(max(gamma, 1.0 / gamma))


def bulk_edge(gamma: float = 1.0) -> float:
    """Upper edge of the noise bulk in scaled units: g^1/4 + g^-1/4."""
    rg4 = math.sqrt(_root_gamma(_check_gamma(gamma)))
    return rg4 + 1.0 / rg4


def inflated_sv(sigma, gamma: float = 1.0):
    """Observed scaled singular value produced by a planted value `sigma`.

    Constant at the bulk edge for sigma < 1, strictly increasing above.
    Symmetric in gamma <-> 1/gamma.  Accepts scalars or arrays.
    """
    gamma = _check_gamma(gamma)
    sigma = np.asarray(sigma, dtype=np.float64)
    if np.any(sigma < 0):
        raise ValueError("sigma must be >= 0")
    rg = _root_gamma(gamma)
    s = np.maximum(sigma, 1.0)
    above = np.sqrt((s + 1.0 / (rg * s)) * (s + rg / s))
    out = np.where(sigma >= 1.0, above, bulk_edge(gamma))
    return float(out) if out.ndim == 0 else out


def debiased_sv(y, gamma: float = 1.0):
    """Inverse of :func:`inflated_sv` on [bulk_edge, inf).

    Closed form: with c = g^1/2 + g^-1/2 the inverse is
    sqrt((y^2 - c + sqrt((y^2 - c)^2 - 4)) / 2).  It is evaluated through
    d = y^2 - edge^2 = (y - edge)(y + edge), which keeps full precision
    at the boundary where the textbook radicand cancels to rounding
    noise.  Inputs within 1e-12 below the edge are clamped up; anything
    lower is a domain error.
    """
    gamma = _check_gamma(gamma)
    edge = bulk_edge(gamma)
    y_arr = np.asarray(y, dtype=np.float64)
    if np.any(y_arr < edge - 1e-12):
        raise ValueError(f"debiased_sv requires y >= bulk edge {edge:.12g}")
    y_arr = np.maximum(y_arr, edge)
    d = (y_arr - edge) * (y_arr + edge)  # = y^2 - c - 2, exactly 0 at the edge
    out = np.sqrt(0.5 * (d + 2.0 + np.sqrt(d * (d + 4.0))))
    return float(out) if out.ndim == 0 else out


def _shrink(sigma0, noise_scale: float, signal_scale: float, delta: float,
            gamma: float) -> tuple[np.ndarray, int]:
    sigma0 = np.asarray(sigma0, dtype=np.float64)
    if sigma0.ndim != 1:
        raise ValueError("sigma0 must be a 1-D array of singular values")
    if np.any(sigma0 < 0) or np.any(np.diff(sigma0) > 0):
        raise ValueError("sigma0 must be non-negative and descending")
    if delta < 0:
        raise ValueError("delta must be >= 0")
    threshold = (1.0 + delta) * bulk_edge(gamma) * noise_scale
    keep = sigma0 >= threshold
    shrunk = np.zeros_like(sigma0)
    if keep.any():
        shrunk[keep] = signal_scale * debiased_sv(sigma0[keep] / noise_scale, gamma)
    return shrunk, int(keep.sum())


def shrink_adaptive(sigma0, fisher_hat: float, delta: float = 0.01,
                    gamma: float = 1.0) -> tuple[np.ndarray, int]:
    """Threshold-and-debias rule driven by estimated Fisher information.

    Values below ``(1 + delta) * bulk_edge * sqrt(fisher_hat)`` map to
    exactly zero; survivors map to
    ``fisher_hat^-1/2 * debiased_sv(fisher_hat^-1/2 * value)``.
    Returns the shrunk values (descending, zeros trailing) and the count
    of survivors.
    """
    if not (fisher_hat > 0):
        raise ValueError("fisher_hat must be positive")
    root = math.sqrt(fisher_hat)
    return _shrink(sigma0, noise_scale=root, signal_scale=1.0 / root,
                   delta=delta, gamma=_check_gamma(gamma))


def shrink_known_sd(sigma0, noise_sd: float, delta: float = 0.01,
                    gamma: float = 1.0) -> tuple[np.ndarray, int]:
    """Same rule with a known noise standard deviation in place of the
    estimated Fisher information: threshold at
    ``(1 + delta) * bulk_edge * noise_sd``, survivors map to
    ``noise_sd * debiased_sv(value / noise_sd)``."""
    if not (noise_sd > 0):
        raise ValueError("noise_sd must be positive")
    return _shrink(sigma0, noise_scale=noise_sd, signal_scale=noise_sd,
                   delta=delta, gamma=_check_gamma(gamma))


@dataclass(frozen=True)
class PerturbationCheck:
    """Outcome of :func:`check_spectral_map_perturbation`.

    `status` is one of "holds", "fails", "hypothesis_not_met"; lhs/rhs are
    the two sides of the bound (NaN when the hypothesis is not met).
    """

    status: str
    lhs: float
    rhs: float


def check_spectral_map_perturbation(a, e, f, k: int, holder, window,
                                    gap: float) -> PerturbationCheck:
    """Numerically evaluate the rank-k spectral-map perturbation bound.

    For A and its perturbation A + E, apply the scalar map `f` to the top
    k singular values of each (keeping the corresponding factors) and
    compare

        lhs = || f(A_k) - f((A+E)_k) ||_op
        rhs = 4 k L ||E||^alpha + (2 / gap) f(sigma_k(A)) ||E||

    where `holder` = (L, alpha) are Holder constants of `f` on the
    `window` = (tau, zeta).  The bound is only claimed when

        zeta > sigma_1(A),
        sigma_k(A) > max(sigma_{k+1}(A), tau) + gap,
        gap > 2 ||E||_op;

    if any of these fail the check reports "hypothesis_not_met" instead
    of a spurious failure.  Diagnostic only: it never raises on a
    violated bound.
    """
    a = as_matrix(a, "a")
    e = as_matrix(e, "e")
    if a.shape != e.shape:
        raise ValueError("a and e must have the same shape")
    p = min(a.shape)
    if not (1 <= k <= p):
        raise ValueError(f"k must be in [1, {p}]")
    L, alpha = holder
    tau, zeta = window
    if L < 0 or not (0 < alpha <= 1):
        raise ValueError("need L >= 0 and alpha in (0, 1]")

    ua, sa, vta = np.linalg.svd(a, full_matrices=False)
    e_norm = op_norm(e)
    sk = sa[k] if k < p else 0.0
    hypothesis = (zeta > sa[0]
                  and sa[k - 1] > max(sk, tau) + gap
                  and gap > 2.0 * e_norm)
    if not hypothesis:
        return PerturbationCheck("hypothesis_not_met", math.nan, math.nan)

    ub, sb, vtb = np.linalg.svd(a + e, full_matrices=False)
    fa = np.array([f(s) for s in sa[:k]], dtype=np.float64)
    fb = np.array([f(s) for s in sb[:k]], dtype=np.float64)
    mapped_a = (ua[:, :k] * fa) @ vta[:k]
    mapped_b = (ub[:, :k] * fb) @ vtb[:k]
    lhs = op_norm(mapped_a - mapped_b)
    rhs = 4.0 * k * L * e_norm ** alpha + (2.0 / gap) * f(sa[k - 1]) * e_norm
    status = "holds" if lhs <= rhs + 1e-9 else "fails"
    return PerturbationCheck(status, float(lhs), float(rhs))
