"""Flatten a ModelSpec into the array layout the kernels consume."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..model import ORDINARY, SAME_AS_CYCLE, ModelSpec

# Kind codes shared by both kernels.
KIND_EXPONENTIAL = 0
KIND_GAMMA = 1
KIND_UNIFORM = 2
KIND_DETERMINISTIC = 3

_KIND_CODE = {
    "exponential": KIND_EXPONENTIAL,
    "gamma": KIND_GAMMA,
    "uniform": KIND_UNIFORM,
    "deterministic": KIND_DETERMINISTIC,
}

DELAY_ORDINARY = 0
DELAY_SAME = 1
DELAY_CUSTOM = 2


@dataclass
class CycleArrays:
    """One cycle law as flat arrays; ``n`` components, ``L`` coordinates."""

    n: int
    kinds: np.ndarray   # int32 (>= 1 slot; padded when n == 0)
    p1: np.ndarray      # float64
    p2: np.ndarray      # float64
    t_const: float
    t_coef: np.ndarray  # float64 (n-aligned)
    r_const: np.ndarray  # float64 (L,)
    r_coef: np.ndarray   # float64 (L, n-aligned), C-contiguous


def _compile_cycle(components, time_form, reward_forms) -> CycleArrays:
    names = list(components)
    index = {name: i for i, name in enumerate(names)}
    n = len(names)
    pad = max(n, 1)  # memoryview-friendly: never zero length
    kinds = np.zeros(pad, dtype=np.int32)
    p1 = np.zeros(pad)
    p2 = np.zeros(pad)
    kinds[:] = KIND_DETERMINISTIC
    for i, name in enumerate(names):
        prim = components[name]
        kinds[i] = _KIND_CODE[prim.kind]
        p1[i] = prim.params[0]
        p2[i] = prim.params[1] if len(prim.params) > 1 else 0.0
    t_coef = np.zeros(pad)
    for name, coef in time_form.terms:
        t_coef[index[name]] += coef
    L = len(reward_forms)
    r_const = np.zeros(L)
    r_coef = np.zeros((L, pad))
    for j, f in enumerate(reward_forms):
        r_const[j] = f.constant
        for name, coef in f.terms:
            r_coef[j, index[name]] += coef
    return CycleArrays(
        n=n,
        kinds=np.ascontiguousarray(kinds),
        p1=np.ascontiguousarray(p1),
        p2=np.ascontiguousarray(p2),
        t_const=float(time_form.constant),
        t_coef=np.ascontiguousarray(t_coef),
        r_const=np.ascontiguousarray(r_const),
        r_coef=np.ascontiguousarray(r_coef),
    )


@dataclass
class CompiledModel:
    L: int
    cycle: CycleArrays
    delay_mode: int
    delay: CycleArrays  # equals ``cycle`` unless delay is custom


def compile_model(spec: ModelSpec) -> CompiledModel:
    cycle = _compile_cycle(spec.components, spec.time, spec.rewards)
    if spec.delay == ORDINARY:
        mode, delay = DELAY_ORDINARY, cycle
    elif spec.delay == SAME_AS_CYCLE:
        mode, delay = DELAY_SAME, cycle
    else:
        mode = DELAY_CUSTOM
        delay = _compile_cycle(
            spec.delay.components, spec.delay.time, spec.delay.rewards
        )
    return CompiledModel(L=spec.L, cycle=cycle, delay_mode=mode, delay=delay)
