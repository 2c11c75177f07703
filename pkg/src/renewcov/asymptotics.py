"""Constants of the mean and covariance time expansions.

For a renewal-reward process with cycle law (T, X_1..X_L), mu_k = E T^k and
growth rates a_i = E X_i / E T, the long-run curves satisfy

    E R_i(t)          = a_i t + b_i     + o(1)
    Cov(R_i, R_j)(t)  = c_ij t + d_ij   + o(1)

and every coefficient is an explicit polynomial in joint cycle moments of
total order <= 4 plus first/second moments of the first cycle.  This module
evaluates them all and assembles the L-vectors and L x L matrices; the
time-parametrized Gaussian built from them lives in :mod:`renewcov.gaussian`.

Two independent closed forms exist for the covariance rate c_ij: the
centered-cycle covariance and the pair-rate/offset combination.  Both are
evaluated on every call and cross-checked; the covariance form is the
reported value.  Disagreement indicates a moment-expansion bug and raises
:class:`ConsistencyError`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError
from .model import CycleMoments

_TWO_FORM_RTOL = 1e-10


def growth_rate(mom: CycleMoments, i: int) -> float:
    """Per-unit-time mean growth of coordinate i: E X_i / E T."""
    return mom.r1[i] / mom.mu1


def mean_correction_ordinary(mom: CycleMoments, i: int) -> float:
    """Constant offset of the mean curve when the first cycle is ordinary."""
    a = growth_rate(mom, i)
    return (0.5 * a * mom.mu2 - mom.tx[i]) / mom.mu1


def mean_correction(mom: CycleMoments, i: int) -> float:
    """Constant offset of the mean curve including the first-cycle terms."""
    a = growth_rate(mom, i)
    return mean_correction_ordinary(mom, i) + mom.x0_mean[i] - a * mom.t0_mean


def mean_resid_integral(mom: CycleMoments, i: int) -> float:
    """Integral over [0, inf) of the mean-curve remainder (ordinary case).

    The remainder is E R_i(t) - a_i t - b_ring_i; its integral has the closed
    form below and feeds the covariance offsets through 2*a*ell cross terms.
    """
    mu1, mu2, mu3 = mom.mu1, mom.mu2, mom.mu3
    lam1 = mom.r1[i]
    return (
        lam1 * mu2 * mu2 / 4.0 / mu1**3
        - lam1 * mu3 / 6.0 / mu1**2
        + mom.ttx[i] / 2.0 / mu1
        - mu2 * mom.tx[i] / 2.0 / mu1**2
    )


def pair_rate(mom: CycleMoments, i: int, j: int) -> float:
    """Growth rate of the accumulated product reward: E[X_i X_j] / E T."""
    return mom.xy[i, j] / mom.mu1


def pair_correction_ordinary(mom: CycleMoments, i: int, j: int) -> float:
    """Constant offset of the accumulated-product mean curve (ordinary)."""
    axy = pair_rate(mom, i, j)
    return (0.5 * axy * mom.mu2 - mom.txy[i, j]) / mom.mu1


def pair_correction_diag(mom: CycleMoments, i: int) -> float:
    """Single-coordinate (i == j) specialization of the pair offset.

    Uses E[T X_i^2] directly; kept as an independent route for the diagonal
    so reduction tests do not share code with the generic pair formula.
    """
    return (0.5 * mom.mu2 * mom.r2[i] / mom.mu1 - mom.txx[i]) / mom.mu1


def cov_rate(mom: CycleMoments, i: int, j: int) -> float:
    """Covariance growth rate c_ij, via the centered-cycle covariance.

    c_ij = Cov(X_i - a_i T, X_j - a_j T) / E T.  The algebraically equal
    pair-rate form a_pair_ij + a_i b_ring_j + a_j b_ring_i is evaluated as a
    runtime cross-check.
    """
    c = _cov_rate_centered(mom, i, j)
    alt = (
        pair_rate(mom, i, j)
        + growth_rate(mom, i) * mean_correction_ordinary(mom, j)
        + growth_rate(mom, j) * mean_correction_ordinary(mom, i)
    )
    if abs(c - alt) > _TWO_FORM_RTOL * max(1.0, abs(c)):
        raise ConsistencyError(
            f"covariance-rate forms disagree at ({i},{j}): {c!r} vs {alt!r}"
        )
    return c


def _cov_rate_centered(mom, i, j):
    ai, aj = growth_rate(mom, i), growth_rate(mom, j)
    e_prod = (
        mom.xy[i, j]
        - ai * mom.tx[j]
        - aj * mom.tx[i]
        + ai * aj * mom.mu2
    )
    e_i = mom.r1[i] - ai * mom.mu1  # zero in exact arithmetic
    e_j = mom.r1[j] - aj * mom.mu1
    return (e_prod - e_i * e_j) / mom.mu1


def cov_rate_residual(mom: CycleMoments, i: int, j: int) -> float:
    """Absolute disagreement between the two c_ij forms (diagnostic)."""
    alt = (
        pair_rate(mom, i, j)
        + growth_rate(mom, i) * mean_correction_ordinary(mom, j)
        + growth_rate(mom, j) * mean_correction_ordinary(mom, i)
    )
    return abs(_cov_rate_centered(mom, i, j) - alt)


def cov_correction_ordinary(mom: CycleMoments, i: int, j: int) -> float:
    """Constant offset d_ring_ij of the covariance curve (ordinary case)."""
    return (
        mean_correction_ordinary(mom, i) * mean_correction_ordinary(mom, j)
        + pair_correction_ordinary(mom, i, j)
        + 2.0 * growth_rate(mom, i) * mean_resid_integral(mom, j)
        + 2.0 * growth_rate(mom, j) * mean_resid_integral(mom, i)
    )


def cov_correction(mom: CycleMoments, i: int, j: int) -> float:
    """Constant offset d_ij of the covariance curve with first-cycle terms."""
    ai, aj = growth_rate(mom, i), growth_rate(mom, j)
    var_t0 = mom.t0_m2 - mom.t0_mean**2
    cov_x0 = mom.x0x0[i, j] - mom.x0_mean[i] * mom.x0_mean[j]
    cov_t0xi = mom.t0x0[i] - mom.t0_mean * mom.x0_mean[i]
    cov_t0xj = mom.t0x0[j] - mom.t0_mean * mom.x0_mean[j]
    return (
        cov_correction_ordinary(mom, i, j)
        - cov_rate(mom, i, j) * mom.t0_mean
        + ai * aj * var_t0
        + cov_x0
        - ai * cov_t0xj
        - aj * cov_t0xi
    )


def cov_correction_ordinary_diag(mom: CycleMoments, i: int) -> float:
    """Single-coordinate route for d_ring_ii (variance-curve offset)."""
    b = mean_correction_ordinary(mom, i)
    return (
        b * b
        + pair_correction_diag(mom, i)
        + 4.0 * growth_rate(mom, i) * mean_resid_integral(mom, i)
    )


def cov_correction_diag(mom: CycleMoments, i: int) -> float:
    """Single-coordinate route for d_ii including first-cycle terms."""
    a = growth_rate(mom, i)
    var_t0 = mom.t0_m2 - mom.t0_mean**2
    var_x0 = mom.x0x0[i, i] - mom.x0_mean[i] ** 2
    cov_t0x0 = mom.t0x0[i] - mom.t0_mean * mom.x0_mean[i]
    return (
        cov_correction_ordinary_diag(mom, i)
        - cov_rate(mom, i, i) * mom.t0_mean
        + a * a * var_t0
        + var_x0
        - 2.0 * a * cov_t0x0
    )


@dataclass
class AsymptoticSummary:
    """Every expansion constant for one model, as vectors and matrices.

    Matrices are filled for i <= j and mirrored, so symmetry is bit-exact.
    ``cov_rate`` is symmetric positive semidefinite (it is 1/mu1 times a
    covariance matrix); the offset matrices are symmetric but in general
    indefinite.
    """

    names: tuple[str, ...]
    growth: np.ndarray              # a
    mean_corr_ord: np.ndarray       # b, ordinary case
    mean_corr: np.ndarray           # b, including first-cycle terms
    resid_integral: np.ndarray      # ell
    pair_rate: np.ndarray           # a_pair, L x L
    pair_corr_ord: np.ndarray       # pair offsets, L x L
    cov_rate: np.ndarray            # C
    cov_corr_ord: np.ndarray        # D, ordinary case
    cov_corr: np.ndarray            # D, including first-cycle terms

    @property
    def L(self) -> int:
        return len(self.growth)


def summarize(mom: CycleMoments) -> AsymptoticSummary:
    """Evaluate all constants of the expansions for every coordinate pair."""
    L = mom.L
    growth = np.array([growth_rate(mom, i) for i in range(L)])
    b_ord = np.array([mean_correction_ordinary(mom, i) for i in range(L)])
    b = np.array([mean_correction(mom, i) for i in range(L)])
    ell = np.array([mean_resid_integral(mom, i) for i in range(L)])
    a_pair = np.empty((L, L))
    b_pair = np.empty((L, L))
    c = np.empty((L, L))
    d_ord = np.empty((L, L))
    d = np.empty((L, L))
    for i in range(L):
        for j in range(i, L):
            a_pair[i, j] = a_pair[j, i] = pair_rate(mom, i, j)
            b_pair[i, j] = b_pair[j, i] = pair_correction_ordinary(mom, i, j)
            c[i, j] = c[j, i] = cov_rate(mom, i, j)
            d_ord[i, j] = d_ord[j, i] = cov_correction_ordinary(mom, i, j)
            d[i, j] = d[j, i] = cov_correction(mom, i, j)
    return AsymptoticSummary(
        names=mom.names or tuple(f"x{i+1}" for i in range(L)),
        growth=growth,
        mean_corr_ord=b_ord,
        mean_corr=b,
        resid_integral=ell,
        pair_rate=a_pair,
        pair_corr_ord=b_pair,
        cov_rate=c,
        cov_corr_ord=d_ord,
        cov_corr=d,
    )
