"""Primitive scalar random variables: exact raw moments, exact samplers.

Models are assembled from small pools of mutually independent primitives.
Keeping the primitive set tiny buys two guarantees the rest of the package
leans on:

* every raw moment ``E U^k`` up to ``MAX_MOMENT_ORDER`` has a closed form,
  so joint moments of anything affine in the primitives are exact to
  rounding, with no numerical integration anywhere on the analytic path;
* sampling uses exact methods only (numpy's ziggurat exponential, gamma
  rejection, inverse-CDF uniform), so simulation error is purely Monte
  Carlo, never bias.

The exponential kind is parametrized by its *mean*, not its rate; models in
this domain are usually stated in terms of mean cycle lengths and a mean
parameter avoids a whole class of reciprocal-convention bugs.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass

import numpy as np

from .errors import ModelError, UnsupportedOrderError

#: Highest supported raw-moment order.  Joint moments of total order 4 feed
#: the asymptotic constants; the rest is property-test headroom.
MAX_MOMENT_ORDER = 12

_KINDS = ("exponential", "gamma", "uniform", "deterministic")


@dataclass(frozen=True)
class Primitive:
    """One independent scalar random variable, identified by kind + params.

    Immutable and freely shareable across threads.  Use the factory
    functions :func:`exponential`, :func:`gamma`, :func:`uniform`,
    :func:`deterministic` rather than constructing directly.
    """

    kind: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ModelError(f"unknown primitive kind {self.kind!r}")
        p = self.params
        if not all(math.isfinite(v) for v in p):
            raise ModelError(f"{self.kind} parameters must be finite, got {p}")
        if self.kind == "exponential":
            if len(p) != 1 or p[0] <= 0:
                raise ModelError(f"exponential requires mean > 0, got {p}")
        elif self.kind == "gamma":
            if len(p) != 2 or p[0] <= 0 or p[1] <= 0:
                raise ModelError(f"gamma requires shape > 0 and scale > 0, got {p}")
        elif self.kind == "uniform":
            if len(p) != 2 or not p[1] > p[0]:
                raise ModelError(f"uniform requires hi > lo, got {p}")
        else:  # deterministic
            if len(p) != 1:
                raise ModelError(f"deterministic takes a single value, got {p}")

    @property
    def nonnegative(self) -> bool:
        """Whether the support is contained in [0, inf)."""
        if self.kind in ("exponential", "gamma"):
            return True
        if self.kind == "uniform":
            return self.params[0] >= 0
        return self.params[0] >= 0


def exponential(mean: float) -> Primitive:
    return Primitive("exponential", (float(mean),))


def gamma(shape: float, scale: float) -> Primitive:
    return Primitive("gamma", (float(shape), float(scale)))


def uniform(lo: float, hi: float) -> Primitive:
    return Primitive("uniform", (float(lo), float(hi)))


def deterministic(value: float) -> Primitive:
    return Primitive("deterministic", (float(value),))


def raw_moment(p: Primitive, k: int) -> float:
    """Exact k-th raw moment ``E U^k``.

    Deterministic and pure: repeated calls agree bit-exactly.  Orders above
    ``MAX_MOMENT_ORDER`` are refused rather than extrapolated.
    """
    k = operator.index(k)
    if k < 0:
        raise ValueError(f"moment order must be nonnegative, got {k}")
    if k > MAX_MOMENT_ORDER:
        raise UnsupportedOrderError(
            f"raw moment order {k} exceeds the supported cap {MAX_MOMENT_ORDER}"
        )
    if k == 0:
        return 1.0
    if p.kind == "exponential":
        return math.factorial(k) * p.params[0] ** k
    if p.kind == "gamma":
        shape, scale = p.params
        out = 1.0
        for i in range(k):
            out *= (shape + i) * scale
        return out
    if p.kind == "uniform":
        # (hi^(k+1) - lo^(k+1)) / ((k+1)(hi-lo)) without the cancellation:
        # average of the homogeneous terms lo^j hi^(k-j).
        lo, hi = p.params
        return sum(lo**j * hi ** (k - j) for j in range(k + 1)) / (k + 1)
    return p.params[0] ** k


def sample(p: Primitive, rng: np.random.Generator) -> float:
    """One variate.  Degenerate kinds consume nothing from the stream."""
    if p.kind == "exponential":
        return rng.exponential(p.params[0])
    if p.kind == "gamma":
        return rng.gamma(p.params[0], p.params[1])
    if p.kind == "uniform":
        return rng.uniform(p.params[0], p.params[1])
    return p.params[0]


def sample_array(p: Primitive, rng: np.random.Generator, size: int) -> np.ndarray:
    """Vectorized :func:`sample`; same methods, same stream layout per call."""
    if p.kind == "exponential":
        return rng.exponential(p.params[0], size)
    if p.kind == "gamma":
        return rng.gamma(p.params[0], p.params[1], size)
    if p.kind == "uniform":
        return rng.uniform(p.params[0], p.params[1], size)
    return np.full(size, p.params[0])
