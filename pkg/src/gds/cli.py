"""Command-line front end: dataset simulation, runs, and evidence studies.

Subcommands
-----------
simulate        write a benchmark dataset CSV plus a .meta.json sidecar
run             execute the sampler, writing draws.csv and diagnostics.json
evidence-study  grid of evidence-accuracy cells against the analytic value

Exit codes: 0 success, 2 configuration error, 3 sampler error (a JSON error
record is printed to stderr), 4 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from .core import GdsConfig, run_gds
from .errors import SamplerError
from .evidence import analytic_log_evidence_linreg, estimate_log_evidence
from .models import (
    constrained_vector,
    load_dataset,
    make_cauchy_normal,
    make_hier_gauss,
    make_lin_reg_conjugate,
    save_dataset,
    save_metadata,
    simulate_hier_gauss,
    simulate_lin_reg,
)

MIN_DRAWS_FOR_EVIDENCE = 30


def config_hash(settings: dict) -> str:
    canonical = json.dumps(settings, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _merge_config_file(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    """Fill unset options from a JSON config file; explicit flags win."""
    if not getattr(args, "config", None):
        return
    try:
        file_values = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except FileNotFoundError:
        parser.error(f"config file not found: {args.config}")
    except json.JSONDecodeError as exc:
        parser.error(f"config file is not valid JSON: {exc}")
    for key, value in file_values.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            parser.error(f"unknown config key {key!r}")
        if getattr(args, attr) is None:
            setattr(args, attr, value)


def _build_model(args: argparse.Namespace):
    """Instantiate the requested model, inferring shape from the dataset."""
    name = args.model
    if name == "cauchy_normal":
        return make_cauchy_normal(), None
    if args.data is None:
        raise ValueError(f"model {name!r} requires --data")
    dataset = load_dataset(args.data)
    units = dataset.n_units
    rows = dataset.n_rows
    if rows % units != 0:
        raise ValueError("dataset units have unequal row counts")
    T = rows // units
    if name == "hier_gauss":
        return make_hier_gauss(units, dataset.n_covariates, T, dataset), dataset
    if name == "lin_reg":
        return make_lin_reg_conjugate(rows, dataset.n_covariates - 1, T, dataset), dataset
    raise ValueError(f"unknown model {name!r}")


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.seed is None:
        args.seed = 0
    if args.model == "hier_gauss":
        k = 4 if args.k is None else args.k
        T = 25 if args.T is None else args.T
        dataset, truth = simulate_hier_gauss(args.n, k=k, T=T, seed=args.seed)
    elif args.model == "lin_reg":
        k = 5 if args.k is None else args.k
        T = 25 if args.T is None else args.T
        dataset, truth = simulate_lin_reg(args.n, k=k, T=T, seed=args.seed)
    else:
        raise ValueError(f"no simulation design for model {args.model!r}")
    out = Path(args.out)
    truth["config_hash"] = config_hash(truth)
    save_dataset(dataset, out.with_suffix(".csv"))
    save_metadata(truth, out.with_suffix(".meta.json"))
    print(f"wrote {out.with_suffix('.csv')} ({dataset.n_rows} rows) and {out.with_suffix('.meta.json')}")
    return 0


def _run_settings(args: argparse.Namespace) -> dict:
    return {
        "command": "run",
        "model": args.model,
        "data": str(args.data) if args.data else None,
        "M": args.M,
        "N": args.N,
        "scale": args.scale,
        "s0": args.s0,
        "pilot": args.pilot,
        "seed": args.seed,
        "workers": args.workers,
        "unconstrained": bool(args.unconstrained),
    }


def cmd_run(args: argparse.Namespace) -> int:
    for field, default in (("M", 10000), ("N", 100), ("s0", 1.0), ("pilot", 100), ("seed", 0), ("workers", 1)):
        if getattr(args, field) is None:
            setattr(args, field, default)
    model, _ = _build_model(args)
    settings = _run_settings(args)
    run_hash = config_hash(settings)
    config = GdsConfig(
        M=args.M,
        N=args.N,
        seed=args.seed,
        scale=args.scale,
        s0=args.s0,
        pilot=args.pilot,
        workers=args.workers,
    )
    result = run_gds(model, config)

    prefix = Path(args.out)
    if prefix.parent != Path("."):
        prefix.parent.mkdir(parents=True, exist_ok=True)

    to_row = (lambda th: th) if args.unconstrained else (lambda th: constrained_vector(model, th))
    d = model.dimension
    lines = ["draw_index,attempts,threshold_v," + ",".join(f"p{j + 1}" for j in range(d))]
    for i, draw in enumerate(result.draws):
        row = to_row(draw.theta)
        lines.append(
            f"{i},{draw.attempts},{repr(draw.threshold)}," + ",".join(repr(float(v)) for v in row)
        )
    draws_path = Path(str(prefix) + "draws.csv")
    draws_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    log_ml = None
    gamma_hat = None
    if result.N >= MIN_DRAWS_FOR_EVIDENCE:
        est = estimate_log_evidence(result)
        log_ml = est.log_marginal_likelihood
        gamma_hat = est.gamma_hat
    diagnostics = {
        "log_c1": result.mode.log_density,
        "log_c2": result.proposal.log_mode_density,
        "scale": result.scale,
        "M": args.M,
        "N": result.N,
        "seed": result.seed,
        "acceptance_rate": result.acceptance_rate,
        "gamma_hat": gamma_hat,
        "log_marginal_likelihood": log_ml,
        "wall_time_seconds": {k: result.timings[k] for k in ("mode", "tune", "proposals", "accept_reject", "total")},
        "total_attempts": result.total_attempts,
        "tuned": result.tuned,
        "workers": args.workers,
        "config_hash": run_hash,
        "model": model.describe(),
        "dropped_pool_draws": result.table.dropped,
    }
    diag_path = Path(str(prefix) + "diagnostics.json")
    diag_path.write_text(json.dumps(diagnostics, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {draws_path} and {diag_path}")
    return 0


def _study_cells(args: argparse.Namespace):
    ks = args.k if isinstance(args.k, list) else [args.k]
    ns = args.n if isinstance(args.n, list) else [args.n]
    ms = args.M if isinstance(args.M, list) else [args.M]
    scales = args.hessian_scale if isinstance(args.hessian_scale, list) else [args.hessian_scale]
    for k in ks:
        for n in ns:
            for m in ms:
                for hs in scales:
                    yield int(k), int(n), int(m), float(hs)


def cmd_evidence_study(args: argparse.Namespace) -> int:
    for field, default in (
        ("k", 5), ("n", 200), ("M", 1000), ("hessian_scale", 0.5),
        ("replicates", 5), ("N", 250), ("T", 25), ("seed", 0), ("workers", 1),
    ):
        if getattr(args, field) is None:
            setattr(args, field, default)

    rows = []
    for k, n, m, hs in _study_cells(args):
        truths, estimates, apes, accepts, walls = [], [], [], [], []
        for rep in range(args.replicates):
            rep_seed = args.seed + 1000 * rep
            dataset, _ = simulate_lin_reg(n, k=k, T=args.T, seed=rep_seed)
            model = make_lin_reg_conjugate(n, k, args.T, dataset)
            truth = analytic_log_evidence_linreg(dataset, model.hyper)
            t0 = time.perf_counter()
            result = run_gds(
                model,
                GdsConfig(M=m, N=args.N, seed=rep_seed, scale=1.0 / hs, workers=args.workers),
            )
            est = estimate_log_evidence(result)
            walls.append(time.perf_counter() - t0)
            truths.append(truth)
            estimates.append(est.log_marginal_likelihood)
            apes.append(abs(est.log_marginal_likelihood - truth) / abs(truth) * 100.0)
            accepts.append(result.acceptance_rate * 100.0)
        rows.append(
            (
                k, n, m, hs, args.replicates,
                float(np.mean(truths)), float(np.std(truths, ddof=1)) if len(truths) > 1 else 0.0,
                float(np.mean(estimates)), float(np.std(estimates, ddof=1)) if len(estimates) > 1 else 0.0,
                float(np.mean(apes)), float(np.std(apes, ddof=1)) if len(apes) > 1 else 0.0,
                float(np.mean(accepts)), float(np.std(accepts, ddof=1)) if len(accepts) > 1 else 0.0,
                float(np.mean(walls)),
            )
        )

    header = (
        "k,n,M,hessian_scale,replicates,mvt_mean,mvt_sd,gds_mean,gds_sd,"
        "ape_pct_mean,ape_pct_sd,accept_pct_mean,accept_pct_sd,wall_seconds_mean"
    )
    out = Path(args.out)
    if out.parent != Path("."):
        out.parent.mkdir(parents=True, exist_ok=True)
    lines = [header] + [",".join(repr(v) if isinstance(v, float) else str(v) for v in row) for row in rows]
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out} ({len(rows)} cells x {args.replicates} replicates)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gds", description="Generalized direct sampling CLI")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="write a benchmark dataset")
    p_sim.add_argument("--config", help="JSON file with option defaults")
    p_sim.add_argument("--model", choices=["hier_gauss", "lin_reg"], required=True)
    p_sim.add_argument("--n", type=int, required=True, help="units (hier_gauss) or total observations (lin_reg)")
    p_sim.add_argument("--k", type=int, default=None)
    p_sim.add_argument("--T", type=int, default=None)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--out", required=True, help="output path stem; writes .csv and .meta.json")
    p_sim.set_defaults(func=cmd_simulate)

    p_run = sub.add_parser("run", help="run the sampler")
    p_run.add_argument("--config", help="JSON file with option defaults")
    p_run.add_argument("--model", choices=["cauchy_normal", "hier_gauss", "lin_reg"], default=None)
    p_run.add_argument("--data", default=None, help="dataset CSV (hier_gauss / lin_reg)")
    p_run.add_argument("--M", type=int, default=None, help="proposal pool size")
    p_run.add_argument("--N", type=int, default=None, help="posterior draws")
    p_run.add_argument("--scale", type=float, default=None, help="fixed proposal covariance scale")
    p_run.add_argument("--s0", type=float, default=None, help="tuning ladder start (used when --scale absent)")
    p_run.add_argument("--pilot", type=int, default=None, help="pilot draws per tuning rung")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--workers", type=int, default=None)
    p_run.add_argument("--unconstrained", action="store_true", help="emit unconstrained parameters in draws.csv")
    p_run.add_argument("--out", required=True, help="output prefix for draws.csv and diagnostics.json")
    p_run.set_defaults(func=cmd_run)

    p_ev = sub.add_parser("evidence-study", help="evidence accuracy grid for the conjugate model")
    p_ev.add_argument("--config", help="JSON file with option defaults (lists allowed for grid axes)")
    p_ev.add_argument("--k", type=int, nargs="+", default=None)
    p_ev.add_argument("--n", type=int, nargs="+", default=None)
    p_ev.add_argument("--M", type=int, nargs="+", default=None)
    p_ev.add_argument(
        "--hessian-scale", dest="hessian_scale", type=float, nargs="+", default=None,
        help="precision multiplier on -H (published-table convention; proposal covariance uses its inverse)",
    )
    p_ev.add_argument("--replicates", type=int, default=None)
    p_ev.add_argument("--N", type=int, default=None)
    p_ev.add_argument("--T", type=int, default=None)
    p_ev.add_argument("--seed", type=int, default=None)
    p_ev.add_argument("--workers", type=int, default=None)
    p_ev.add_argument("--out", required=True, help="report CSV path")
    p_ev.set_defaults(func=cmd_evidence_study)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _merge_config_file(args, parser)
    if getattr(args, "model", None) is None and args.command in ("run",):
        parser.error("--model is required (flag or config file)")
    try:
        return args.func(args)
    except SamplerError as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
