"""Seeded, parallel Monte Carlo engine for reward paths.

Replications are split into blocks; block k owns the substream
``SeedSequence(master_seed, spawn_key=(k,))``, so stream identity never
depends on scheduling and the result is bit-identical for a fixed
(master_seed, block_size, replications) triple whatever the worker count.
Each block produces a mergeable statistic (count, mean vector, centered
second-moment matrix, plus the same for the coordinate minimum); blocks are
combined in index order with the exact pairwise update, and covariance
standard errors come from a leave-one-block-out jackknife.

Per-block statistics deliberately avoid BLAS-backed reductions (matmul/dot):
numpy's pairwise summation is deterministic regardless of any BLAS
threading, which keeps the worker-count invariance testable at the byte
level.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..asymptotics import summarize
from ..errors import DimensionError, ModelError, NotPositiveDefiniteError, RunawayPathError
from ..gaussian import GaussianApprox
from ..model import ModelSpec, cycle_moments
from ._backend import kernel_for, resolve_backend
from ._compile import compile_model

DEFAULT_BLOCK_SIZE = 16384
DEFAULT_MAX_CYCLES = 10**9


@dataclass
class SimConfig:
    """Evaluation grid, replication budget, and stream layout."""

    time_grid: tuple[float, ...]
    replications: int = 1_000_000
    master_seed: int = 1
    block_size: int = DEFAULT_BLOCK_SIZE
    max_cycles: int = DEFAULT_MAX_CYCLES

    def __post_init__(self):
        grid = tuple(float(t) for t in self.time_grid)
        if not grid:
            raise ModelError("time grid must not be empty")
        if any(t <= 0 for t in grid):
            raise ModelError("grid times must be positive")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ModelError("grid times must be strictly increasing")
        self.time_grid = grid
        if self.replications < 2:
            raise ModelError("at least 2 replications are required")
        if not 0 <= self.master_seed < 2**64:
            raise ModelError("master_seed must fit in 64 bits")
        if self.block_size < 1:
            raise ModelError("block_size must be positive")
        if self.max_cycles < 1:
            raise ModelError("max_cycles must be positive")

    def blocks(self):
        """(index, size) per block; the last block may be short."""
        out = []
        remaining = self.replications
        b = 0
        while remaining > 0:
            size = min(self.block_size, remaining)
            out.append((b, size))
            remaining -= size
            b += 1
        return out


@dataclass
class _BlockStats:
    count: int
    mean: np.ndarray     # (G, L)
    m2: np.ndarray       # (G, L, L) centered second-moment sums
    min_mean: np.ndarray  # (G,)
    min_m2: np.ndarray    # (G,)


def _block_stats(values: np.ndarray) -> _BlockStats:
    n, G, L = values.shape
    mins = values.min(axis=2)
    mean = values.sum(axis=0) / n
    xc = values - mean[None, :, :]
    m2 = np.empty((G, L, L))
    for i in range(L):
        for j in range(i, L):
            s = np.sum(xc[:, :, i] * xc[:, :, j], axis=0)
            m2[:, i, j] = s
            m2[:, j, i] = s
    min_mean = mins.sum(axis=0) / n
    mc = mins - min_mean[None, :]
    min_m2 = np.sum(mc * mc, axis=0)
    return _BlockStats(n, mean, m2, min_mean, min_m2)


def _merge(a: _BlockStats, b: _BlockStats) -> _BlockStats:
    n = a.count + b.count
    w = b.count / n
    delta = b.mean - a.mean
    mean = a.mean + delta * w
    corr = a.count * w  # n_a * n_b / n
    m2 = a.m2 + b.m2 + delta[:, :, None] * delta[:, None, :] * corr
    dmin = b.min_mean - a.min_mean
    min_mean = a.min_mean + dmin * w
    min_m2 = a.min_m2 + b.min_m2 + dmin * dmin * corr
    return _BlockStats(n, mean, m2, min_mean, min_m2)


def _demerge(total: _BlockStats, part: _BlockStats) -> _BlockStats:
    """Statistics of the complement (total minus part)."""
    n2 = total.count - part.count
    mean2 = (total.count * total.mean - part.count * part.mean) / n2
    delta = part.mean - mean2
    corr = part.count * n2 / total.count
    m2 = total.m2 - part.m2 - delta[:, :, None] * delta[:, None, :] * corr
    min_mean2 = (total.count * total.min_mean - part.count * part.min_mean) / n2
    dmin = part.min_mean - min_mean2
    min_m2 = total.min_m2 - part.min_m2 - dmin * dmin * corr
    return _BlockStats(n2, mean2, m2, min_mean2, min_m2)


@dataclass
class SimEstimate:
    """Empirical means, covariances, and coordinate minima per grid time."""

    grid: np.ndarray          # (G,)
    names: tuple[str, ...]
    replications: int
    nblocks: int
    backend: str
    mean: np.ndarray          # (G, L)
    cov: np.ndarray           # (G, L, L) sample covariance
    se_mean: np.ndarray       # (G, L)
    se_cov: np.ndarray        # (G, L, L) block-jackknife standard errors
    min_mean: np.ndarray      # (G,)
    min_se: np.ndarray        # (G,)

    @property
    def L(self) -> int:
        return self.mean.shape[1]


def simulate(
    spec: ModelSpec,
    cfg: SimConfig,
    *,
    workers: int = 1,
    backend: str | None = None,
) -> SimEstimate:
    """Estimate R(t) statistics over cfg.time_grid by block simulation."""
    backend = resolve_backend(backend)
    kernel = kernel_for(backend)
    cm = compile_model(spec)
    grid = np.asarray(cfg.time_grid)
    plan = cfg.blocks()

    def run(block) -> _BlockStats:
        b, size = block
        bg = np.random.PCG64(np.random.SeedSequence(cfg.master_seed, spawn_key=(b,)))
        try:
            values = kernel.run_block(cm, bg, size, grid, cfg.max_cycles)
        except RunawayPathError as exc:
            raise RunawayPathError(
                f"{exc} [block {b}, master_seed {cfg.master_seed}, spawn_key ({b},)]",
                block_index=b,
                seed=cfg.master_seed,
            ) from exc
        return _block_stats(values)

    if workers > 1 and len(plan) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(run, plan))
    else:
        stats = [run(block) for block in plan]

    total = stats[0]
    for s in stats[1:]:
        total = _merge(total, s)

    n = total.count
    cov = total.m2 / (n - 1)
    se_mean = np.sqrt(np.maximum(np.diagonal(cov, axis1=1, axis2=2), 0.0) / n)
    min_se = np.sqrt(np.maximum(total.min_m2 / (n - 1), 0.0) / n)
    se_cov = _jackknife_cov_se(total, stats)
    return SimEstimate(
        grid=grid,
        names=spec.reward_names,
        replications=n,
        nblocks=len(stats),
        backend=backend,
        mean=total.mean,
        cov=cov,
        se_mean=se_mean,
        se_cov=se_cov,
        min_mean=total.min_mean,
        min_se=min_se,
    )


def _jackknife_cov_se(total: _BlockStats, stats: list[_BlockStats]) -> np.ndarray:
    """Leave-one-block-out standard errors for the covariance entries."""
    B = len(stats)
    G, L, _ = total.m2.shape
    if B < 2:
        return np.full((G, L, L), np.nan)
    thetas = np.empty((B, G, L, L))
    for k, s in enumerate(stats):
        rest = _demerge(total, s)
        thetas[k] = rest.m2 / (rest.count - 1)
    theta_bar = thetas.sum(axis=0) / B
    dev = thetas - theta_bar
    return np.sqrt((B - 1) / B * np.sum(dev * dev, axis=0))


@dataclass
class CompareTable:
    """Simulation estimate of E min vs the analytic approximation.

    ``err_* = mtilde_* - min_mean``: the signed approximation errors, with
    and without the covariance offset matrix; both approximations share the
    same simulated paths, so the error curves are positively correlated.
    """

    grid: np.ndarray
    min_mean: np.ndarray      # simulated E min
    min_se: np.ndarray
    mtilde_no_d: np.ndarray   # analytic, covariance C*t
    mtilde_with_d: np.ndarray  # analytic, covariance C*t + D
    err_no_d: np.ndarray
    err_with_d: np.ndarray
    use_b: bool
    t0: float | None
    estimate: SimEstimate


def compare(
    spec: ModelSpec,
    cfg: SimConfig,
    *,
    use_b: bool = True,
    workers: int = 1,
    backend: str | None = None,
) -> CompareTable:
    """Error curves of the analytic expected minimum against simulation."""
    if spec.L != 2:
        raise DimensionError(
            f"compare needs exactly 2 reward coordinates, model has {spec.L}"
        )
    approx = GaussianApprox.from_summary(summarize(cycle_moments(spec)))
    if approx.t0 is not None:
        bad = [t for t in cfg.time_grid if t <= approx.t0]
        if bad:
            raise NotPositiveDefiniteError(
                f"grid times {bad} are not above the PD threshold t0 = {approx.t0}",
                t0=approx.t0,
            )
    est = simulate(spec, cfg, workers=workers, backend=backend)
    no_d = np.array([approx.expected_min(t, use_b=use_b, use_d=False) for t in est.grid])
    with_d = np.array([approx.expected_min(t, use_b=use_b, use_d=True) for t in est.grid])
    return CompareTable(
        grid=est.grid,
        min_mean=est.min_mean,
        min_se=est.min_se,
        mtilde_no_d=no_d,
        mtilde_with_d=with_d,
        err_no_d=no_d - est.min_mean,
        err_with_d=with_d - est.min_mean,
        use_b=use_b,
        t0=approx.t0,
        estimate=est,
    )
