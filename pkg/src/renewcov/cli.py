"""Command-line front end.

Commands: ``analyze`` (expansion constants and PD threshold), ``approx``
(analytic Gaussian parameters and expected minimum over a time grid),
``simulate`` (Monte Carlo estimates), ``compare`` (analytic vs simulated
expected minimum, the error-curve experiment), ``validate`` (invariant suite
for one model file).

Every table output carries a manifest header with the fields that determine
the output bytes (model digest, seed, grid, toggles, backend, ...); re-running
the same command with the same arguments reproduces the bytes exactly.  The
worker count is deliberately not part of the manifest: results are
worker-count invariant and the resolved value goes to stderr diagnostics
instead.  Numeric output uses 12 significant digits so regression diffs stay
meaningful below simulation noise.

Exit codes: 0 success, 1 internal error, 2 parse error, 3 validation error,
4 PD-regime error, 5 resource (runaway path) error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .asymptotics import (
    cov_correction_diag,
    cov_rate_residual,
    summarize,
)
from .errors import (
    ModelError,
    ModelParseError,
    NotPositiveDefiniteError,
    RenewcovError,
    RunawayPathError,
)
from .gaussian import GaussianApprox, is_positive_definite
from .model import ORDINARY, SAME_AS_CYCLE, cycle_moments, sample_cycles
from .modelfile import parse_model_file
from .simulate import SimConfig, compare, resolve_backend, simulate
from .simulate._engine import DEFAULT_MAX_CYCLES

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_PD = 4
EXIT_RESOURCE = 5

_WORKERS_ENV = "RENEWCOV_WORKERS"


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "nan" if math.isnan(v) else f"{v:.12g}"
    return str(v)


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isnan(v) else float(f"{v:.12g}")
    if isinstance(v, (int, np.integer)):
        return int(v)
    return v


@dataclass
class RunManifest:
    """Everything that determines the output bytes of one run."""

    command: str
    model_path: str
    model_sha256: str
    version: str = __version__
    backend: str | None = None
    master_seed: int | None = None
    replications: int | None = None
    block_size: int | None = None
    grid: tuple[float, ...] | None = None
    use_b: bool | None = None
    use_d: bool | None = None

    def items(self):
        out = [
            ("command", self.command),
            ("version", self.version),
            ("model-path", self.model_path),
            ("model-sha256", self.model_sha256),
        ]
        if self.backend is not None:
            out.append(("backend", self.backend))
        if self.master_seed is not None:
            out.append(("master-seed", str(self.master_seed)))
        if self.replications is not None:
            out.append(("replications", str(self.replications)))
        if self.block_size is not None:
            out.append(("block-size", str(self.block_size)))
        if self.grid is not None:
            out.append(("grid", ",".join(_fmt(t) for t in self.grid)))
        if self.use_b is not None:
            out.append(("use-b", _fmt(self.use_b)))
        if self.use_d is not None:
            out.append(("use-D", _fmt(self.use_d)))
        return out


def _write_table(args, manifest: RunManifest, columns, rows) -> None:
    if args.format == "json":
        doc = {
            "manifest": dict(manifest.items()),
            "columns": list(columns),
            "rows": [[_json_value(v) for v in row] for row in rows],
        }
        text = json.dumps(doc, indent=2) + "\n"
    else:
        buf = io.StringIO()
        for key, value in manifest.items():
            buf.write(f"# {key}: {value}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        text = buf.getvalue()
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)


def _load_model(args):
    spec = parse_model_file(args.model)
    with open(args.model, "rb") as fh:
        digest = hashlib.sha256(fh.read()).hexdigest()
    if spec.lattice:
        print(
            "warning: the clock is declared lattice; the expansion constants "
            "assume a spread-out cycle-length distribution and are reported "
            "anyway",
            file=sys.stderr,
        )
    return spec, digest


def _resolve_workers(args) -> int:
    w = getattr(args, "workers", None)
    if w is None:
        w = os.environ.get(_WORKERS_ENV)
        w = int(w) if w else (os.cpu_count() or 1)
    if w < 1:
        raise ModelError("workers must be >= 1")
    return w


def _grid(args) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in args.grid.split(","))
    except ValueError as exc:
        raise ModelError(f"bad grid {args.grid!r}: {exc}") from exc


def _sim_config(args) -> SimConfig:
    return SimConfig(
        time_grid=_grid(args),
        replications=args.reps,
        master_seed=args.seed,
        block_size=args.block_size,
        max_cycles=args.max_cycles,
    )


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_analyze(args) -> int:
    spec, digest = _load_model(args)
    mom = cycle_moments(spec)
    summary = summarize(mom)
    approx = GaussianApprox.from_summary(summary)
    names = summary.names
    L = summary.L

    rows = []
    for label, vec in [
        ("growth", summary.growth),
        ("mean_corr_ord", summary.mean_corr_ord),
        ("mean_corr", summary.mean_corr),
        ("resid_integral", summary.resid_integral),
    ]:
        for i in range(L):
            rows.append((label, names[i], None, vec[i]))
    for label, mat in [
        ("pair_rate", summary.pair_rate),
        ("pair_corr_ord", summary.pair_corr_ord),
        ("cov_rate", summary.cov_rate),
        ("cov_corr_ord", summary.cov_corr_ord),
        ("cov_corr", summary.cov_corr),
    ]:
        for i in range(L):
            for j in range(L):
                rows.append((label, names[i], names[j], mat[i, j]))
    rows.append(("pd_threshold", None, None, approx.t0))
    rows.append(("pd_always", None, None, 1 if approx.always_pd else 0))
    residual = max(
        cov_rate_residual(mom, i, j) for i in range(L) for j in range(i, L)
    )
    rows.append(("cov_rate_residual_max", None, None, residual))

    if approx.t0 is None:
        print(
            "warning: covariance rate matrix is singular; no PD threshold "
            "exists and covariance-offset requests are gated per time point",
            file=sys.stderr,
        )
    manifest = RunManifest(
        command="analyze", model_path=args.model, model_sha256=digest
    )
    _write_table(args, manifest, ("quantity", "i", "j", "value"), rows)
    return EXIT_OK


def cmd_approx(args) -> int:
    spec, digest = _load_model(args)
    approx = GaussianApprox.from_summary(summarize(cycle_moments(spec)))
    grid = _grid(args)
    names = approx.names
    L = approx.L

    columns = ["t", "status"]
    columns += [f"mean_{n}" for n in names]
    pairs = [(i, j) for i in range(L) for j in range(i, L)]
    columns += [f"cov_{names[i]}_{names[j]}" for i, j in pairs]
    if L == 2:
        columns.append("expected_min")

    rows = []
    for t in grid:
        try:
            mean, cov = approx.params_at(t, use_b=args.use_b, use_d=args.use_d)
        except NotPositiveDefiniteError:
            rows.append(
                [t, "below_pd_threshold"]
                + [None] * (len(columns) - 2)
            )
            continue
        row = [t, "ok"]
        row += [mean[i] for i in range(L)]
        row += [cov[i, j] for i, j in pairs]
        if L == 2:
            row.append(approx.expected_min(t, use_b=args.use_b, use_d=args.use_d))
        rows.append(row)

    manifest = RunManifest(
        command="approx",
        model_path=args.model,
        model_sha256=digest,
        grid=grid,
        use_b=args.use_b,
        use_d=args.use_d,
    )
    _write_table(args, manifest, columns, rows)
    return EXIT_OK


def _estimate_columns(names):
    L = len(names)
    pairs = [(i, j) for i in range(L) for j in range(i, L)]
    columns = ["t", "n"]
    columns += [f"mean_{n}" for n in names]
    columns += [f"se_mean_{n}" for n in names]
    columns += [f"cov_{names[i]}_{names[j]}" for i, j in pairs]
    columns += [f"se_cov_{names[i]}_{names[j]}" for i, j in pairs]
    columns += ["min_mean", "min_se"]
    return columns, pairs


def cmd_simulate(args) -> int:
    spec, digest = _load_model(args)
    cfg = _sim_config(args)
    workers = _resolve_workers(args)
    backend = resolve_backend(args.backend)
    print(f"info: backend={backend} workers={workers}", file=sys.stderr)
    est = simulate(spec, cfg, workers=workers, backend=backend)

    columns, pairs = _estimate_columns(est.names)
    rows = []
    for k, t in enumerate(est.grid):
        row = [t, est.replications]
        row += [est.mean[k, i] for i in range(est.L)]
        row += [est.se_mean[k, i] for i in range(est.L)]
        row += [est.cov[k, i, j] for i, j in pairs]
        row += [est.se_cov[k, i, j] for i, j in pairs]
        row += [est.min_mean[k], est.min_se[k]]
        rows.append(row)

    manifest = RunManifest(
        command="simulate",
        model_path=args.model,
        model_sha256=digest,
        backend=backend,
        master_seed=cfg.master_seed,
        replications=cfg.replications,
        block_size=cfg.block_size,
        grid=cfg.time_grid,
    )
    _write_table(args, manifest, columns, rows)
    return EXIT_OK


def cmd_compare(args) -> int:
    spec, digest = _load_model(args)
    cfg = _sim_config(args)
    workers = _resolve_workers(args)
    backend = resolve_backend(args.backend)
    print(f"info: backend={backend} workers={workers}", file=sys.stderr)
    table = compare(spec, cfg, use_b=args.use_b, workers=workers, backend=backend)

    columns = [
        "t",
        "m_hat",
        "se_m_hat",
        "mtilde_no_D",
        "mtilde_with_D",
        "err_no_D",
        "err_with_D",
    ]
    rows = [
        [
            table.grid[k],
            table.min_mean[k],
            table.min_se[k],
            table.mtilde_no_d[k],
            table.mtilde_with_d[k],
            table.err_no_d[k],
            table.err_with_d[k],
        ]
        for k in range(len(table.grid))
    ]
    manifest = RunManifest(
        command="compare",
        model_path=args.model,
        model_sha256=digest,
        backend=backend,
        master_seed=cfg.master_seed,
        replications=cfg.replications,
        block_size=cfg.block_size,
        grid=cfg.time_grid,
        use_b=args.use_b,
    )
    _write_table(args, manifest, columns, rows)
    return EXIT_OK


def cmd_validate(args) -> int:
    spec, digest = _load_model(args)
    checks = []

    def check(name, ok, detail=""):
        checks.append(ok)
        print(f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else ""))

    mom = cycle_moments(spec)
    check("moment-invariants", True, "cycle moments satisfy sanity bounds")
    summary = summarize(mom)
    L = summary.L

    residual = max(
        cov_rate_residual(mom, i, j) for i in range(L) for j in range(i, L)
    )
    scale = max(1.0, float(np.max(np.abs(summary.cov_rate))))
    check("two-form-identity", residual <= 1e-10 * scale, f"max residual {residual:.3e}")

    sym = all(
        np.array_equal(m, m.T)
        for m in (summary.cov_rate, summary.cov_corr_ord, summary.cov_corr)
    )
    check("matrix-symmetry", sym, "C, D matrices bit-exactly symmetric")

    eigmin = float(np.linalg.eigvalsh(summary.cov_rate)[0])
    check(
        "cov-rate-psd",
        eigmin >= -1e-12 * max(1.0, float(np.trace(summary.cov_rate))),
        f"min eigenvalue {eigmin:.3e}",
    )

    diag_dev = max(
        abs(summary.cov_corr[i, i] - cov_correction_diag(mom, i))
        / max(1.0, abs(summary.cov_corr[i, i]))
        for i in range(L)
    )
    check("diagonal-reduction", diag_dev <= 1e-12, f"max relative deviation {diag_dev:.3e}")

    if spec.delay == ORDINARY:
        check(
            "delay-consistency",
            np.array_equal(summary.cov_corr, summary.cov_corr_ord),
            "ordinary delay: offset matrices identical",
        )
    elif spec.delay == SAME_AS_CYCLE:
        dev = float(np.max(np.abs(summary.cov_corr - summary.cov_corr_ord)))
        check(
            "delay-consistency",
            dev <= 1e-10 * max(1.0, float(np.max(np.abs(summary.cov_corr)))),
            "same-as-cycle delay: first-cycle terms cancel",
        )
    else:
        check("delay-consistency", True, "custom delay: no identity to enforce")

    if is_positive_definite(summary.cov_rate):
        approx = GaussianApprox.from_summary(summary)
        t0 = approx.t0
        ok = is_positive_definite(summary.cov_rate * (t0 + 1e-6) + summary.cov_corr)
        if t0 > 1e-6:
            ok = ok and not is_positive_definite(
                summary.cov_rate * (t0 - 1e-6) + summary.cov_corr
            )
        check("pd-threshold", ok, f"t0 = {_fmt(t0)}")
    else:
        check("pd-threshold", True, "rate matrix singular; threshold undefined")

    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(args.seed)))
    t, x = sample_cycles(spec, rng, args.reps)
    worst = 0.0
    cols = {"T": t}
    for i in range(L):
        cols[f"X_{spec.reward_names[i]}"] = x[:, i]
    targets = {"E[T]": (t, mom.mu1), "E[T^2]": (t * t, mom.mu2)}
    for i in range(L):
        n = spec.reward_names[i]
        targets[f"E[{n}]"] = (x[:, i], mom.r1[i])
        targets[f"E[{n}^2]"] = (x[:, i] ** 2, mom.r2[i])
        targets[f"E[T {n}]"] = (t * x[:, i], mom.tx[i])
        for j in range(i, L):
            m = spec.reward_names[j]
            targets[f"E[{n} {m}]"] = (x[:, i] * x[:, j], mom.xy[i, j])
    for label, (samples, exact) in targets.items():
        se = float(np.std(samples, ddof=1)) / math.sqrt(len(samples))
        dev = abs(float(np.mean(samples)) - exact) / se if se > 0 else 0.0
        worst = max(worst, dev)
    check(
        "sampler-vs-moments",
        worst <= 4.0,
        f"worst moment deviation {worst:.2f} standard errors ({args.reps} cycles)",
    )

    print(f"model {args.model} sha256 {digest[:12]}...: "
          f"{sum(checks)}/{len(checks)} checks passed")
    return EXIT_OK if all(checks) else EXIT_VALIDATION


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _add_common(p):
    p.add_argument("--model", required=True, help="model file (TOML)")
    p.add_argument("--out", default="-", help="output path, - for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_toggles(p, with_d=True):
    p.add_argument("--use-b", dest="use_b", action="store_true", default=True,
                   help="include the mean offset vector (default)")
    p.add_argument("--no-b", dest="use_b", action="store_false",
                   help="plain linear mean")
    if with_d:
        p.add_argument("--use-D", dest="use_d", action="store_true", default=True,
                       help="include the covariance offset matrix (default)")
        p.add_argument("--no-D", dest="use_d", action="store_false",
                       help="plain rate covariance")


def _add_sim(p):
    p.add_argument("--grid", required=True, help="comma-separated times")
    p.add_argument("--reps", type=int, default=1_000_000,
                   help="replications (default 1e6)")
    p.add_argument("--seed", type=int, default=1, help="master seed (64-bit)")
    p.add_argument("--block-size", type=int, default=16384,
                   help="replications per stream block")
    p.add_argument("--max-cycles", type=int, default=DEFAULT_MAX_CYCLES,
                   help="per-path cycle budget")
    p.add_argument("--workers", type=int, default=None,
                   help=f"worker threads (default ${_WORKERS_ENV} or cpu count)")
    p.add_argument("--backend", default=None,
                   choices=("auto", "compiled", "python"),
                   help="simulation kernel (default auto)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="renewcov",
        description="Asymptotic constants, refined normal approximation, and "
                    "Monte Carlo simulation for multivariate renewal-reward "
                    "processes.",
    )
    parser.add_argument("--version", action="version", version=f"renewcov {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="expansion constants and PD threshold")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("approx", help="Gaussian parameters and expected minimum")
    _add_common(p)
    p.add_argument("--grid", required=True, help="comma-separated times")
    _add_toggles(p)
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("simulate", help="Monte Carlo estimates over a grid")
    _add_common(p)
    _add_sim(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="analytic vs simulated expected minimum")
    _add_common(p)
    _add_sim(p)
    _add_toggles(p, with_d=False)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("validate", help="run the invariant suite on a model")
    p.add_argument("--model", required=True, help="model file (TOML)")
    p.add_argument("--reps", type=int, default=20_000,
                   help="cycles for the sampler check")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ModelParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NotPositiveDefiniteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PD
    except RunawayPathError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except RenewcovError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
