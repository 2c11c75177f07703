"""Shared fixtures and model factories for the test suite."""

from pathlib import Path

import numpy as np
import pytest

from renewcov import (
    ORDINARY,
    SAME_AS_CYCLE,
    AffineForm,
    DelayCycle,
    ModelSpec,
    deterministic,
    exponential,
    form,
    gamma,
    uniform,
)

MODELS_DIR = Path(__file__).resolve().parent.parent / "docs" / "models"


def bivariate_shared_exponential() -> ModelSpec:
    """The benchmark model: T = u1+u4, x = u2+u4, y = u3+u4.

    Exact constants: a = [1, 3/4], b = [-1, -7/8], ell = [1, 15/16],
    C = [[1, 3/8], [3/8, 7/16]], D = [[1/2, 1/2], [1/2, 13/64]],
    t0 = (sqrt(731) - 3) / 38.
    """
    return ModelSpec(
        components={
            "u1": exponential(1.0),
            "u2": exponential(1.0),
            "u3": exponential(0.5),
            "u4": exponential(1.0),
        },
        time=form(u1=1.0, u4=1.0),
        rewards=(form(u2=1.0, u4=1.0), form(u3=1.0, u4=1.0)),
        reward_names=("x", "y"),
        delay=SAME_AS_CYCLE,
    )


def poisson_unit_reward(delay=ORDINARY) -> ModelSpec:
    return ModelSpec(
        components={"gap": exponential(1.0)},
        time=form(gap=1.0),
        rewards=(form(1.0),),
        reward_names=("count",),
        delay=delay,
    )


def compound_poisson_pair() -> ModelSpec:
    """Clock-independent rewards: Var R_i(t) = t E[X_i^2] / E[T] exactly."""
    return ModelSpec(
        components={
            "gap": exponential(1.0),
            "jump_x": gamma(2.0, 0.5),
            "jump_y": uniform(0.0, 3.0),
        },
        time=form(gap=1.0),
        rewards=(form(jump_x=1.0), form(jump_y=1.0)),
        reward_names=("x", "y"),
    )


def _random_primitive(rng, allow_deterministic=True):
    kinds = 4 if allow_deterministic else 3
    k = int(rng.integers(0, kinds))
    if k == 0:
        return exponential(float(rng.uniform(0.2, 2.0)))
    if k == 1:
        return gamma(float(rng.uniform(0.5, 3.0)), float(rng.uniform(0.2, 1.5)))
    if k == 2:
        lo = float(rng.uniform(0.0, 1.0))
        return uniform(lo, lo + float(rng.uniform(0.2, 2.0)))
    return deterministic(float(rng.uniform(0.2, 2.0)))


def random_model(seed, L=None, full_rank=False, delay_mode=None) -> ModelSpec:
    """A feasible random model; feasibility comes from construction, not
    rejection, so every seed yields a valid spec.

    ``full_rank`` guarantees a nonsingular covariance rate matrix by using at
    least L non-degenerate components and boosting a distinct component per
    reward coordinate.
    """
    rng = np.random.default_rng(seed)
    if L is None:
        L = int(rng.integers(1, 4))
    n_comp = int(rng.integers(1, 5))
    if full_rank:
        n_comp = max(n_comp, L)
    comps = {
        f"c{k}": _random_primitive(rng, allow_deterministic=not full_rank)
        for k in range(n_comp)
    }
    names = list(comps)

    k_time = int(rng.integers(1, n_comp + 1))
    picks = rng.choice(n_comp, size=k_time, replace=False)
    time_form = AffineForm(
        float(rng.uniform(0.0, 0.5)),
        tuple((names[i], float(rng.uniform(0.1, 1.5))) for i in picks),
    )

    rewards = []
    for i in range(L):
        if full_rank:
            coefs = rng.uniform(0.2, 1.5, n_comp) * rng.choice([-1.0, 1.0], n_comp)
            coefs[i % n_comp] += 2.0
            terms = tuple((names[c], float(coefs[c])) for c in range(n_comp))
            const = float(rng.uniform(-0.5, 0.5))
        else:
            k_r = int(rng.integers(0, n_comp + 1))
            sel = rng.choice(n_comp, size=k_r, replace=False)
            terms = tuple(
                (names[c], float(rng.uniform(0.1, 1.5) * rng.choice([-1.0, 1.0])))
                for c in sel
            )
            const = float(rng.uniform(0.2, 1.0)) if not terms else float(rng.uniform(-0.5, 0.5))
        rewards.append(AffineForm(const, terms))

    if delay_mode is None:
        delay_mode = [ORDINARY, SAME_AS_CYCLE, "custom"][int(rng.integers(0, 3))]
    if delay_mode == "custom":
        d_comps = {"d0": _random_primitive(rng), "d1": _random_primitive(rng)}
        d_time = AffineForm(
            float(rng.uniform(0.0, 0.5)), (("d0", float(rng.uniform(0.1, 1.0))),)
        )
        d_rewards = tuple(
            AffineForm(
                float(rng.uniform(-0.5, 0.5)),
                (("d1", float(rng.uniform(-1.0, 1.0))),),
            )
            for _ in range(L)
        )
        delay = DelayCycle(components=d_comps, time=d_time, rewards=d_rewards)
    else:
        delay = delay_mode

    return ModelSpec(
        components=comps,
        time=time_form,
        rewards=tuple(rewards),
        delay=delay,
    )


@pytest.fixture
def benchmark_spec():
    return bivariate_shared_exponential()


@pytest.fixture
def models_dir():
    return MODELS_DIR
