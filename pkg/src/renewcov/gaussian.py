"""Time-parametrized normal approximation and the expected minimum.

The reward vector at time t is approximated as normal with mean a*t + b and
covariance C*t + D, where (a, b, C, D) come from the asymptotic summary.
The offset matrix D need not be positive definite; whenever the rate matrix
C is PD there is a threshold t0 such that C*t + D is PD exactly for t > t0.
This module locates t0 by bisection on a Cholesky predicate and evaluates
the closed-form expected minimum of a bivariate normal, which together give
a cheap analytic approximation of E min over two coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import AsymptoticSummary
from .errors import DimensionError, ModelError, NotPositiveDefiniteError

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _norm_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / _SQRT2)


def _norm_pdf(z: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * z * z)


def is_positive_definite(m: np.ndarray) -> bool:
    """Strict PD test: does a Cholesky factorization exist?

    Factorization success is the semantically relevant event here (the
    matrix must be usable as a covariance), and it is cheaper than an
    eigendecomposition.
    """
    try:
        np.linalg.cholesky(m)
        return True
    except np.linalg.LinAlgError:
        return False


def _check_symmetric(m, name):
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ModelError(f"{name} must be a square matrix")
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.T)) > 1e-12 * scale:
        raise ModelError(f"{name} must be symmetric")
    return m


def pd_threshold(C, D, tol: float = 1e-9) -> float:
    """Smallest t (to within tol) beyond which C*t + D is PD.

    Requires C symmetric and strictly PD; D symmetric.  Returns 0.0 when D
    itself is PD (the matrix is then PD for every t >= 0).  Once C*t + D is
    positive semidefinite, adding more of the PD matrix C makes it strictly
    PD, so the predicate is monotone in t and bisection applies.
    """
    C = _check_symmetric(C, "rate matrix")
    D = _check_symmetric(D, "offset matrix")
    if C.shape != D.shape:
        raise ModelError("rate and offset matrices must have the same shape")
    if not is_positive_definite(C):
        raise ModelError("rate matrix must be strictly positive definite")
    if is_positive_definite(D):
        return 0.0
    hi = 1.0
    for _ in range(80):
        if is_positive_definite(C * hi + D):
            break
        hi *= 2.0
    else:  # unreachable for PD C; guard against numerical pathologies
        raise ModelError("no positive-definite regime found for C*t + D")
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if is_positive_definite(C * mid + D):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def expected_min_bivariate(mean_w, mean_v, var_w, var_v, cov) -> float:
    """Closed-form E min(W, V) for (W, V) bivariate normal.

    With theta = sqrt(Var W + Var V - 2 Cov(W, V)), the standard deviation of
    W - V:

        E min = mean_w * Phi((mean_v - mean_w)/theta)
              + mean_v * Phi((mean_w - mean_v)/theta)
              - theta  * phi((mean_w - mean_v)/theta)

    and min(mean_w, mean_v) when theta == 0 (the coordinates are almost
    surely equal up to a constant shift of zero).
    """
    if var_w < 0 or var_v < 0:
        raise ValueError("variances must be nonnegative")
    if cov * cov > var_w * var_v * (1.0 + 1e-9) + 1e-30:
        raise ValueError(
            f"covariance {cov} violates |cov| <= sqrt(var_w * var_v)"
        )
    theta = math.sqrt(max(var_w + var_v - 2.0 * cov, 0.0))
    if theta == 0.0:
        return min(mean_w, mean_v)
    z = (mean_w - mean_v) / theta
    return mean_w * _norm_cdf(-z) + mean_v * _norm_cdf(z) - theta * _norm_pdf(z)


_PSD_RTOL = 1e-12


def _is_psd(m) -> bool:
    w = np.linalg.eigvalsh(m)
    return w[0] >= -_PSD_RTOL * max(1.0, float(np.trace(m)))


@dataclass
class GaussianApprox:
    """N(a*t + b, C*t + D) with its positive-definiteness threshold.

    ``t0`` is the bisection threshold when the rate matrix is strictly PD;
    ``always_pd`` marks offset matrices that are themselves PD (valid at
    every t >= 0).  For degenerate (singular PSD) rate matrices no threshold
    exists; ``t0`` is None and covariance requests are gated by a direct PSD
    check instead.
    """

    names: tuple[str, ...]
    mean_rate: np.ndarray
    mean_offset: np.ndarray
    cov_rate: np.ndarray
    cov_offset: np.ndarray
    t0: float | None
    always_pd: bool

    @classmethod
    def from_summary(cls, summary: AsymptoticSummary) -> "GaussianApprox":
        C = summary.cov_rate
        D = summary.cov_corr
        if is_positive_definite(C):
            t0 = pd_threshold(C, D)
            always = is_positive_definite(D)
        else:
            t0, always = None, False
        return cls(
            names=summary.names,
            mean_rate=summary.growth,
            mean_offset=summary.mean_corr,
            cov_rate=C,
            cov_offset=D,
            t0=t0,
            always_pd=always,
        )

    @property
    def L(self) -> int:
        return len(self.mean_rate)

    def params_at(self, t: float, use_b: bool = True, use_d: bool = True):
        """Mean vector and covariance matrix at time t.

        With ``use_d`` the covariance is C*t + D and t must lie in the PD
        regime (t > t0); without it the plain rate covariance C*t is used,
        valid at every t >= 0.  ``use_b`` toggles the mean offset the same
        way.
        """
        if t < 0:
            raise ValueError("t must be nonnegative")
        mean = self.mean_rate * t
        if use_b:
            mean = mean + self.mean_offset
        if not use_d:
            return mean, self.cov_rate * t
        cov = self.cov_rate * t + self.cov_offset
        if self.t0 is not None:
            if not t > self.t0:
                raise NotPositiveDefiniteError(
                    f"covariance C*t + D is not positive definite at t = {t}; "
                    f"the PD regime starts at t0 = {self.t0}",
                    t0=self.t0,
                )
        elif not _is_psd(cov):
            raise NotPositiveDefiniteError(
                f"covariance C*t + D is not positive semidefinite at t = {t} "
                "(degenerate rate matrix)",
                t0=None,
            )
        return mean, cov

    def expected_min(self, t: float, use_b: bool = True, use_d: bool = True) -> float:
        """Analytic E min over the two coordinates at time t."""
        if self.L != 2:
            raise DimensionError(
                f"expected minimum is only available for 2 coordinates, model has {self.L}"
            )
        mean, cov = self.params_at(t, use_b=use_b, use_d=use_d)
        return expected_min_bivariate(
            mean[0], mean[1], cov[0, 0], cov[1, 1], cov[0, 1]
        )
