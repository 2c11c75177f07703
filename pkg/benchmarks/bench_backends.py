#!/usr/bin/env python3
"""Throughput comparison of the simulation backends.

Runs the same seeded workload through every available kernel (the compiled
extension and the pure-Python/numpy fallback) and reports wall time and path
throughput.  Results are statistics-identical in distribution but not
bit-identical across backends (different stream consumption order), so only
timing is compared here.

Usage:
    python benchmarks/bench_backends.py [--reps N] [--workers W] [--model PATH]
"""

import argparse
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from renewcov import SimConfig, simulate  # noqa: E402
from renewcov.modelfile import parse_model_file  # noqa: E402
from renewcov.simulate import available_backends  # noqa: E402

DEFAULT_MODEL = (
    pathlib.Path(__file__).resolve().parent.parent
    / "docs" / "models" / "bivariate_shared_exponential.toml"
)


def run(args):
    spec = parse_model_file(args.model)
    cfg = SimConfig(
        time_grid=tuple(float(t) for t in args.grid.split(",")),
        replications=args.reps,
        master_seed=args.seed,
    )
    print(f"model: {args.model}")
    print(f"grid: {cfg.time_grid}  replications: {cfg.replications:,}  "
          f"workers: {args.workers}")
    print()
    print(f"{'backend':<10} {'wall [s]':>9} {'paths/s':>12} {'speedup':>8}")
    base = None
    for backend in available_backends():
        # warm-up pass absorbs one-time import/alloc costs
        warm = SimConfig(time_grid=cfg.time_grid, replications=2048,
                         master_seed=cfg.master_seed)
        simulate(spec, warm, workers=args.workers, backend=backend)
        start = time.perf_counter()
        simulate(spec, cfg, workers=args.workers, backend=backend)
        elapsed = time.perf_counter() - start
        rate = cfg.replications / elapsed
        if base is None:
            base = elapsed
        print(f"{backend:<10} {elapsed:>9.2f} {rate:>12,.0f} {base / elapsed:>7.2f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--model", default=str(DEFAULT_MODEL))
    parser.add_argument("--grid", default="1,2,4,8,16,32")
    parser.add_argument("--reps", type=int, default=1_000_000)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--workers", type=int, default=1)
    run(parser.parse_args())


if __name__ == "__main__":
    main()
