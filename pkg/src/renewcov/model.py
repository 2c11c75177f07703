"""Declarative cycle models and exact joint moments.

A model describes one cycle of a renewal-reward process: the cycle length T
and L reward coordinates X_1..X_L, each written as an affine form

    constant + sum(coef * component)

over one shared pool of mutually independent primitive variables.  Sharing a
component between coordinates is what creates dependence *within* a cycle;
distinct cycles are always independent.  The first cycle (index 0) may follow
a different law: ``ordinary`` (length 0, zero rewards), ``same-as-cycle`` (an
independent copy of the cycle law), or a custom :class:`DelayCycle`.

Because every coordinate is affine in independent primitives, any joint
moment E[T^i X_1^j1 ... X_L^jL] of total order <= MAX_JOINT_ORDER expands
multinomially into products of primitive raw moments and is exact to
rounding.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .distributions import Primitive, raw_moment, sample, sample_array
from .errors import ConsistencyError, ModelError, UnsupportedOrderError

#: Largest total order i + j1 + ... + jL served by joint_moment.  The
#: asymptotic constants need exactly 4 (E T^2 X is joint order 3, E T X_i X_j
#: is 3, and the fourth order appears once rewards enter quadratically).
MAX_JOINT_ORDER = 4

ORDINARY = "ordinary"
SAME_AS_CYCLE = "same-as-cycle"

_REL_SLACK = 1e-9  # rounding slack for moment sanity checks


@dataclass(frozen=True)
class AffineForm:
    """constant + sum(coef * component), components referenced by name.

    Duplicate references are merged and zero coefficients dropped at
    construction, so two forms that denote the same function compare equal.
    """

    constant: float = 0.0
    terms: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        merged: dict[str, float] = {}
        for name, coef in self.terms:
            merged[name] = merged.get(name, 0.0) + float(coef)
        clean = tuple((n, c) for n, c in merged.items() if c != 0.0)
        object.__setattr__(self, "constant", float(self.constant))
        object.__setattr__(self, "terms", clean)

    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.terms)


def form(constant: float = 0.0, **coefs: float) -> AffineForm:
    """Shorthand constructor: ``form(1.5, u1=2.0, u4=-1.0)``."""
    return AffineForm(constant, tuple(coefs.items()))


@dataclass
class DelayCycle:
    """Law of the first cycle when it differs from the recurring cycle law."""

    components: dict[str, Primitive]
    time: AffineForm
    rewards: tuple[AffineForm, ...]

    def __post_init__(self):
        self.rewards = tuple(self.rewards)
        _check_references(self.components, self.time, self.rewards, where="delay")
        _check_time_form(self.components, self.time, where="delay")
        # Unlike recurring cycles, a delay cycle may be degenerate (zero
        # length and/or zero rewards).


@dataclass
class ModelSpec:
    """Full process specification.  Treat as immutable once constructed."""

    components: dict[str, Primitive]
    time: AffineForm
    rewards: tuple[AffineForm, ...]
    reward_names: tuple[str, ...] = ()
    delay: str | DelayCycle = ORDINARY
    lattice: bool = False

    def __post_init__(self):
        self.rewards = tuple(self.rewards)
        if not self.reward_names:
            self.reward_names = tuple(f"x{i+1}" for i in range(len(self.rewards)))
        self.reward_names = tuple(self.reward_names)
        if len(self.rewards) < 1:
            raise ModelError("at least one reward coordinate is required")
        if len(self.reward_names) != len(self.rewards):
            raise ModelError("reward_names must match rewards in length")
        if len(set(self.reward_names)) != len(self.reward_names):
            raise ModelError("reward names must be unique")
        if isinstance(self.delay, str) and self.delay not in (ORDINARY, SAME_AS_CYCLE):
            raise ModelError(
                f"delay must be {ORDINARY!r}, {SAME_AS_CYCLE!r} or a DelayCycle, "
                f"got {self.delay!r}"
            )
        if isinstance(self.delay, DelayCycle) and len(self.delay.rewards) != self.L:
            raise ModelError(
                f"delay cycle has {len(self.delay.rewards)} reward forms, model has {self.L}"
            )
        _check_references(self.components, self.time, self.rewards, where="model")
        _check_time_form(self.components, self.time, where="model")
        # Triviality guards: the recurring cycle length and every recurring
        # reward must not be almost surely zero.
        if _law_moment(self.components, self.time, self.rewards, 1, (0,) * self.L) <= 0.0:
            raise ModelError("time coordinate is almost surely zero")
        for i, name in enumerate(self.reward_names):
            powers = tuple(2 if j == i else 0 for j in range(self.L))
            if _law_moment(self.components, self.time, self.rewards, 0, powers) <= 0.0:
                raise ModelError(f"reward coordinate {name!r} is almost surely zero")

    @property
    def L(self) -> int:
        return len(self.rewards)


def _check_references(components, time_form, reward_forms, where):
    for label, f in [("time", time_form)] + [
        (f"reward {i}", f) for i, f in enumerate(reward_forms)
    ]:
        for name in f.names():
            if name not in components:
                raise ModelError(
                    f"{where}: {label} form references unknown component {name!r}"
                )


def _check_time_form(components, time_form, where):
    """Cheap sufficient condition for T >= 0 almost surely."""
    if time_form.constant < 0:
        raise ModelError(f"{where}: time constant must be >= 0")
    for name, coef in time_form.terms:
        if coef < 0:
            raise ModelError(
                f"{where}: negative coefficient on time component {name!r}"
            )
        if not components[name].nonnegative:
            raise ModelError(
                f"{where}: time component {name!r} can be negative; "
                "time forms may only use nonnegative-support primitives"
            )


# ---------------------------------------------------------------------------
# Exact joint moments by multinomial expansion.
#
# A polynomial in the components is a dict {exponent tuple: coefficient}
# where the tuple has one entry per declared component.  Affine forms start
# with degree <= 1; products stay small because total order is capped at 4.
# ---------------------------------------------------------------------------


def _form_poly(order: dict[str, int], f: AffineForm, n: int):
    poly = {}
    if f.constant != 0.0:
        poly[(0,) * n] = f.constant
    for name, coef in f.terms:
        e = [0] * n
        e[order[name]] = 1
        poly[tuple(e)] = poly.get(tuple(e), 0.0) + coef
    return poly


def _poly_mul(p, q):
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0.0) + c1 * c2
    return out


def _law_moment(components, time_form, reward_forms, t_power, reward_powers):
    total = t_power + sum(reward_powers)
    if total > MAX_JOINT_ORDER:
        raise UnsupportedOrderError(
            f"joint moment of total order {total} exceeds the cap {MAX_JOINT_ORDER}"
        )
    if total == 0:
        return 1.0
    names = list(components)
    order = {name: i for i, name in enumerate(names)}
    n = len(names)
    poly = {(0,) * n: 1.0}
    for f, power in itertools.chain(
        [(time_form, t_power)], zip(reward_forms, reward_powers)
    ):
        fp = None
        for _ in range(power):
            fp = _form_poly(order, f, n) if fp is None else fp
            poly = _poly_mul(poly, fp)
    # E of each monomial factorizes across independent components.
    out = 0.0
    for exps, coef in poly.items():
        term = coef
        for i, e in enumerate(exps):
            if e:
                term *= raw_moment(components[names[i]], e)
        out += term
    return out


def joint_moment(spec: ModelSpec, t_power: int, reward_powers) -> float:
    """Exact E[T^i * prod X_c^{j_c}] for the recurring cycle law."""
    reward_powers = tuple(int(p) for p in reward_powers)
    if len(reward_powers) != spec.L:
        raise ModelError(
            f"expected {spec.L} reward powers, got {len(reward_powers)}"
        )
    if t_power < 0 or any(p < 0 for p in reward_powers):
        raise ValueError("powers must be nonnegative")
    return _law_moment(spec.components, spec.time, spec.rewards, t_power, reward_powers)


# ---------------------------------------------------------------------------
# The moment bundle consumed by the asymptotic constants.
# ---------------------------------------------------------------------------


@dataclass
class CycleMoments:
    """All scalar joint moments the expansions need, for L coordinates.

    Naming: ``mu_k = E T^k``; ``r1/r2`` are first/second reward moments;
    ``tx/ttx/txx`` are E[T X_i], E[T^2 X_i], E[T X_i^2]; ``xy/txy`` are the
    pair matrices E[X_i X_j], E[T X_i X_j].  ``t0_*`` and ``x0_*`` describe
    the first cycle.
    """

    mu1: float
    mu2: float
    mu3: float
    r1: np.ndarray
    r2: np.ndarray
    tx: np.ndarray
    ttx: np.ndarray
    txx: np.ndarray
    xy: np.ndarray
    txy: np.ndarray
    t0_mean: float
    t0_m2: float
    x0_mean: np.ndarray
    t0x0: np.ndarray
    x0x0: np.ndarray
    names: tuple[str, ...] = ()

    @property
    def L(self) -> int:
        return len(self.r1)

    def check(self):
        """Sanity invariants; a violation means an expansion bug."""
        slack = _REL_SLACK
        if not self.mu1 > 0:
            raise ConsistencyError(f"mu1 = {self.mu1} must be positive")
        if self.mu2 < self.mu1**2 - slack * max(1.0, self.mu2):
            raise ConsistencyError("mu2 < mu1^2: negative cycle-length variance")
        if self.t0_m2 < self.t0_mean**2 - slack * max(1.0, self.t0_m2):
            raise ConsistencyError("E T0^2 < (E T0)^2")
        for i in range(self.L):
            if self.tx[i] ** 2 > self.mu2 * self.r2[i] * (1 + slack) + slack:
                raise ConsistencyError(
                    f"Cauchy-Schwarz violated for E[T X_{i}]"
                )
            for j in range(self.L):
                if self.xy[i, j] != self.xy[j, i] or self.txy[i, j] != self.txy[j, i]:
                    raise ConsistencyError("pair moment matrices must be symmetric")
                if self.xy[i, j] ** 2 > self.r2[i] * self.r2[j] * (1 + slack) + slack:
                    raise ConsistencyError(
                        f"Cauchy-Schwarz violated for E[X_{i} X_{j}]"
                    )


def cycle_moments(spec: ModelSpec) -> CycleMoments:
    """Populate every moment via exact multinomial expansion."""
    L = spec.L
    comps, tf, rf = spec.components, spec.time, spec.rewards

    def m(tp, *pairs):
        powers = [0] * L
        for idx, p in pairs:
            powers[idx] += p
        return _law_moment(comps, tf, rf, tp, tuple(powers))

    r1 = np.array([m(0, (i, 1)) for i in range(L)])
    r2 = np.array([m(0, (i, 2)) for i in range(L)])
    tx = np.array([m(1, (i, 1)) for i in range(L)])
    ttx = np.array([m(2, (i, 1)) for i in range(L)])
    txx = np.array([m(1, (i, 2)) for i in range(L)])
    xy = np.empty((L, L))
    txy = np.empty((L, L))
    for i in range(L):
        for j in range(i, L):
            xy[i, j] = xy[j, i] = m(0, (i, 1), (j, 1))
            txy[i, j] = txy[j, i] = m(1, (i, 1), (j, 1))

    if spec.delay == ORDINARY:
        t0_mean = t0_m2 = 0.0
        x0_mean = np.zeros(L)
        t0x0 = np.zeros(L)
        x0x0 = np.zeros((L, L))
    elif spec.delay == SAME_AS_CYCLE:
        t0_mean, t0_m2 = m(1), m(2)
        x0_mean, t0x0 = r1.copy(), tx.copy()
        x0x0 = xy.copy()
    else:
        d = spec.delay

        def dm(tp, *pairs):
            powers = [0] * L
            for idx, p in pairs:
                powers[idx] += p
            return _law_moment(d.components, d.time, d.rewards, tp, tuple(powers))

        t0_mean, t0_m2 = dm(1), dm(2)
        x0_mean = np.array([dm(0, (i, 1)) for i in range(L)])
        t0x0 = np.array([dm(1, (i, 1)) for i in range(L)])
        x0x0 = np.empty((L, L))
        for i in range(L):
            for j in range(i, L):
                x0x0[i, j] = x0x0[j, i] = dm(0, (i, 1), (j, 1))

    out = CycleMoments(
        mu1=m(1), mu2=m(2), mu3=m(3),
        r1=r1, r2=r2, tx=tx, ttx=ttx, txx=txx, xy=xy, txy=txy,
        t0_mean=t0_mean, t0_m2=t0_m2, x0_mean=x0_mean, t0x0=t0x0, x0x0=x0x0,
        names=spec.reward_names,
    )
    out.check()
    return out


# ---------------------------------------------------------------------------
# Sampling.  Components are drawn in declaration order; coordinates then
# evaluate their forms on the shared draws, which reproduces the exact
# within-cycle dependence structure.
# ---------------------------------------------------------------------------


def _eval_forms(components, time_form, reward_forms, values: dict[str, float]):
    t = time_form.constant
    for name, coef in time_form.terms:
        t += coef * values[name]
    x = np.empty(len(reward_forms))
    for i, f in enumerate(reward_forms):
        acc = f.constant
        for name, coef in f.terms:
            acc += coef * values[name]
        x[i] = acc
    return t, x


def sample_cycle(spec: ModelSpec, rng: np.random.Generator):
    """One recurring cycle: (t, reward vector)."""
    values = {name: sample(p, rng) for name, p in spec.components.items()}
    return _eval_forms(spec.components, spec.time, spec.rewards, values)


def sample_delay(spec: ModelSpec, rng: np.random.Generator):
    """One first cycle according to the delay mode."""
    if spec.delay == ORDINARY:
        return 0.0, np.zeros(spec.L)
    if spec.delay == SAME_AS_CYCLE:
        return sample_cycle(spec, rng)
    d = spec.delay
    values = {name: sample(p, rng) for name, p in d.components.items()}
    return _eval_forms(d.components, d.time, d.rewards, values)


def sample_cycles(spec: ModelSpec, rng: np.random.Generator, n: int):
    """n recurring cycles, component-major batch draws.

    Returns (t, x) with shapes (n,) and (n, L).  Meant for moment oracles;
    the stream layout differs from repeated :func:`sample_cycle` calls.
    """
    u = {name: sample_array(p, rng, n) for name, p in spec.components.items()}
    t = np.full(n, spec.time.constant)
    for name, coef in spec.time.terms:
        t += coef * u[name]
    x = np.empty((n, spec.L))
    for i, f in enumerate(spec.rewards):
        acc = np.full(n, f.constant)
        for name, coef in f.terms:
            acc += coef * u[name]
        x[:, i] = acc
    return t, x
