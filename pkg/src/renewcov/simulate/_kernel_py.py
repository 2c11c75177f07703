"""Pure-Python simulation kernel, vectorized across the paths of a block.

Semantics (shared with the compiled kernel):

* the first cycle follows the delay mode; ordinary means length 0 and zero
  rewards and consumes nothing from the stream;
* cycle n contributes its reward vector to R(t) exactly for t >= S_n, where
  S_n is the cumulative length including the first cycle;
* a grid time coinciding with an epoch therefore includes that epoch's
  reward (the recording predicate is grid < S, strictly).

This kernel draws each round's component variates as arrays over the still
active paths, so it consumes the block stream in a different order than the
compiled per-path kernel; the two backends are statistically equivalent but
not draw-for-draw identical.
"""

from __future__ import annotations

import numpy as np

from ..errors import RunawayPathError
from ._compile import (
    KIND_DETERMINISTIC,
    KIND_EXPONENTIAL,
    KIND_GAMMA,
    CompiledModel,
    CycleArrays,
    DELAY_ORDINARY,
)

name = "python"


def _draw(ca: CycleArrays, rng: np.random.Generator, m: int):
    """m cycles: returns (t, x) with shapes (m,) and (m, L)."""
    u = np.empty((m, ca.n)) if ca.n else np.empty((m, 0))
    for c in range(ca.n):
        kind = ca.kinds[c]
        if kind == KIND_EXPONENTIAL:
            u[:, c] = rng.exponential(ca.p1[c], m)
        elif kind == KIND_GAMMA:
            u[:, c] = rng.gamma(ca.p1[c], ca.p2[c], m)
        elif kind == KIND_DETERMINISTIC:
            u[:, c] = ca.p1[c]
        else:
            u[:, c] = rng.uniform(ca.p1[c], ca.p2[c], m)
    t = np.full(m, ca.t_const)
    for c in range(ca.n):
        if ca.t_coef[c] != 0.0:
            t += ca.t_coef[c] * u[:, c]
    L = len(ca.r_const)
    x = np.empty((m, L))
    for j in range(L):
        acc = np.full(m, ca.r_const[j])
        for c in range(ca.n):
            if ca.r_coef[j, c] != 0.0:
                acc += ca.r_coef[j, c] * u[:, c]
        x[:, j] = acc
    return t, x


def _record(out, grid, next_g, s, r, idx):
    """Record R for every grid point the paths in idx passed this round."""
    G = len(grid)
    for g in range(G):
        m = idx[(next_g[idx] == g) & (s[idx] > grid[g])]
        if m.size:
            out[m, g, :] = r[m]
            next_g[m] = g + 1


def run_block(
    cm: CompiledModel,
    bit_generator,
    n_paths: int,
    grid: np.ndarray,
    max_cycles: int,
) -> np.ndarray:
    """Simulate one block; returns R at each grid time, shape (n_paths, G, L)."""
    rng = np.random.Generator(bit_generator)
    G = len(grid)
    out = np.zeros((n_paths, G, cm.L))
    s = np.zeros(n_paths)
    r = np.zeros((n_paths, cm.L))
    next_g = np.zeros(n_paths, dtype=np.intp)

    idx = np.arange(n_paths)
    if cm.delay_mode != DELAY_ORDINARY:
        t0, x0 = _draw(cm.delay, rng, n_paths)
        s += t0
        _record(out, grid, next_g, s, r, idx)
        r += x0

    idx = idx[next_g[idx] < G]
    rounds = 0
    while idx.size:
        rounds += 1
        if rounds > max_cycles:
            raise RunawayPathError(
                f"{idx.size} paths still running after {max_cycles} cycles"
            )
        t, x = _draw(cm.cycle, rng, idx.size)
        s[idx] += t
        _record(out, grid, next_g, s, r, idx)
        r[idx] += x
        idx = idx[next_g[idx] < G]
    return out
