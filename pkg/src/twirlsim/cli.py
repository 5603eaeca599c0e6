"""Command-line interface.

Subcommands:
  simulate  evolve a state exactly or by sampling; writes state and metrics
  verify    run randomized self-checks; nonzero exit on failure
  bench     tabulate the truncation window and sampled cost across times
  qpe       estimate eigenvalues from conjugate-basis readout statistics

Exit codes: 0 success, 1 verification or assertion failure, 2 configuration
or parse error. The TWIRLSIM_THREADS environment variable sets the worker
count for sampled runs (absent = single-threaded); results do not depend on
it.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time

import numpy as np

from .channels import apply_choi, choi_of_superoperator, superoperator_of_schur
from .config import (
    RunConfig,
    build_distribution,
    load_config_file,
    parse_config,
    thread_count,
)
from .cvqpe import resolve_spectrum
from .distributions import CompoundPoisson, Gaussian, TruncatedGaussian
from .errors import ConfigError, ParseError
from .matio import format_float, write_matrix
from .sampling import (
    ShotPlan,
    cutoff,
    estimate_channel,
    estimate_compound_channel,
    mean_sampled_cost,
    scaling_table,
    tv_bound,
)
from .twirling import exact_channel
from .verify import run_verification

METRICS_HEADER = ["mode", "t", "epsilon", "S", "shots", "total_sim_time",
                  "choi_distance_to_exact", "tv_bound", "wall_seconds"]
BENCH_HEADER = ["t", "epsilon", "S", "S_over_sqrt_t", "mean_abs_s"]
QPE_HEADER = ["index", "estimate", "stderr", "raw_mean", "ci5_low", "ci5_high"]
CHOI_DISTANCE_MAX_DIM = 16


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format_float(value)


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _choi_distance_to_exact(empirical, cfg: RunConfig, dist) -> float | None:
    if cfg.dim > CHOI_DISTANCE_MAX_DIM:
        return None
    channel = exact_channel(cfg.hamiltonian, dist)
    exact_choi = choi_of_superoperator(superoperator_of_schur(channel.multiplier))
    from .channels import choi_trace_distance
    return choi_trace_distance(empirical.choi, exact_choi)


def cmd_simulate(args) -> int:
    data = load_config_file(args.config)
    overrides = {}
    for key in ("t", "epsilon", "shots", "seed"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    if args.state_out is not None:
        overrides["state_out"] = args.state_out
    if args.metrics_out is not None:
        overrides["metrics_out"] = args.metrics_out
    cfg = parse_config(data, base_dir=_config_dir(args.config), overrides=overrides)
    if cfg.state_out is None or cfg.metrics_out is None:
        raise ConfigError("outputs", "simulate needs outputs.state and outputs.metrics")
    threads = thread_count()
    kind = cfg.distribution_config.get("kind")
    started = time.perf_counter()

    if cfg.shots is None:
        dist = build_distribution(cfg.distribution_config, cfg.t, cfg.epsilon)
        channel = exact_channel(cfg.hamiltonian, dist)
        final_state = channel.apply(cfg.initial_state)
        row = ["exact", cfg.t, cfg.epsilon, None, None, None, None, None,
               time.perf_counter() - started]
    elif kind in ("gaussian", "truncated_gaussian"):
        if cfg.t <= 0.0:
            raise ConfigError("evolution.t", "sampled gaussian runs need t > 0")
        dist = build_distribution(cfg.distribution_config, cfg.t, cfg.epsilon)
        s_cut = dist.cutoff if isinstance(dist, TruncatedGaussian) else cutoff(cfg.t, cfg.epsilon)
        plan = ShotPlan(t=cfg.t, epsilon=cfg.epsilon, cutoff=s_cut,
                        shots=cfg.shots, seed=cfg.seed)
        empirical, ledger = estimate_channel(cfg.hamiltonian, plan, threads=threads)
        final_state = apply_choi(empirical.choi, cfg.initial_state)
        truncated = TruncatedGaussian(variance=cfg.t, cutoff=s_cut)
        distance = _choi_distance_to_exact(empirical, cfg, truncated)
        row = ["sampled_gaussian", cfg.t, cfg.epsilon, s_cut, cfg.shots,
               ledger.total_time, distance, tv_bound(cfg.t, s_cut),
               time.perf_counter() - started]
    elif kind == "compound_poisson":
        dist = build_distribution(cfg.distribution_config, cfg.t, cfg.epsilon)
        assert isinstance(dist, CompoundPoisson)
        empirical, ledger = estimate_compound_channel(
            cfg.hamiltonian, dist.base, cfg.t, cfg.shots, cfg.seed, threads=threads)
        distance = _choi_distance_to_exact(empirical, cfg, dist)
        final_state = apply_choi(empirical.choi, cfg.initial_state)
        row = ["sampled_compound", cfg.t, cfg.epsilon, None, cfg.shots,
               ledger.total_time, distance, None, time.perf_counter() - started]
    else:
        raise ConfigError("sampler.shots",
                          f"distribution kind {kind!r} has no sampler; run without shots")

    write_matrix(cfg.state_out, final_state)
    _write_csv(cfg.metrics_out, METRICS_HEADER, [row])
    print(f"wrote {cfg.state_out} and {cfg.metrics_out}")
    return 0


def _config_dir(path: str) -> str:
    import os
    return os.path.dirname(os.path.abspath(path))


def cmd_verify(args) -> int:
    dims = _parse_int_list(args.dims, "--dims")
    report, ok = run_verification(dims=dims, trials=args.trials, seed=args.seed,
                                  inject_fault=args.inject_fault)
    print(report)
    return 0 if ok else 1


def cmd_bench(args) -> int:
    ts = _parse_float_list(args.ts, "--ts")
    epsilons = _parse_float_list(args.epsilons, "--epsilons")
    rows = []
    for eps in epsilons:
        table = scaling_table(ts, eps)
        ratios = [row[2] for row in table]
        spread = max(ratios) - min(ratios)
        if spread > 1e-12:
            print(f"error: S/sqrt(t) not constant at epsilon={eps}: spread {spread:.3e}",
                  file=sys.stderr)
            return 1
        for (t, s_cut, ratio) in table:
            mean_cost = mean_sampled_cost(t, eps, args.draws, args.seed)
            rows.append([t, eps, s_cut, ratio, mean_cost])
    if args.csv_out:
        _write_csv(args.csv_out, BENCH_HEADER, rows)
        print(f"wrote {args.csv_out}")
    else:
        print(",".join(BENCH_HEADER))
        for row in rows:
            print(",".join(_fmt(v) for v in row))
    return 0


def cmd_qpe(args) -> int:
    data = load_config_file(args.config)
    cfg = parse_config(data, base_dir=_config_dir(args.config),
                       overrides={"t": args.t} if args.t is not None else None)
    shots = args.shots
    seed = args.seed if args.seed is not None else cfg.seed
    if seed is None:
        raise ConfigError("sampler.seed", "qpe needs a seed (flag or config)")
    if shots is None:
        shots = cfg.shots
    if shots is None:
        raise ConfigError("sampler.shots", "qpe needs a shot count (flag or config)")
    if shots < 2:
        raise ConfigError("sampler.shots",
                          f"need at least 2 shots for a standard error, got {shots}")
    t = cfg.t
    if t <= 0:
        raise ConfigError("evolution.t", f"qpe needs t > 0, got {t}")
    runs = resolve_spectrum(cfg.hamiltonian, t, shots, seed)
    if args.eigen_index is not None:
        if not 0 <= args.eigen_index < len(runs):
            raise ConfigError("--eigen-index",
                              f"index {args.eigen_index} out of range for dimension {len(runs)}")
        runs = [runs[args.eigen_index]]
    rows = []
    for idx, run in enumerate(runs):
        index = args.eigen_index if args.eigen_index is not None else idx
        low = run.estimate - 5 * run.stderr
        high = run.estimate + 5 * run.stderr
        rows.append([index, run.estimate, run.stderr, run.raw_mean, low, high])
        print(f"eigenvalue[{index}]: raw mean {_fmt(run.raw_mean)}, "
              f"estimate {_fmt(run.estimate)} +- {_fmt(run.stderr)}, "
              f"5-sigma interval [{_fmt(low)}, {_fmt(high)}]")
    if args.csv_out:
        _write_csv(args.csv_out, QPE_HEADER, rows)
        print(f"wrote {args.csv_out}")
    return 0


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise ConfigError(flag, f"expected comma-separated integers, got {text!r}") from None


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise ConfigError(flag, f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twirlsim",
                                     description="Hamiltonian twirling channel toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="evolve a state exactly or by sampling")
    sim.add_argument("--config", required=True)
    sim.add_argument("--t", type=float, default=None)
    sim.add_argument("--epsilon", type=float, default=None)
    sim.add_argument("--shots", type=int, default=None)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--state-out", default=None)
    sim.add_argument("--metrics-out", default=None)
    sim.set_defaults(func=cmd_simulate)

    ver = sub.add_parser("verify", help="run randomized self-checks")
    ver.add_argument("--dims", default="2,4,8")
    ver.add_argument("--trials", type=int, default=20)
    ver.add_argument("--seed", type=int, default=7)
    ver.add_argument("--inject-fault", action="store_true",
                     help="corrupt one multiplier diagonal to prove failures are caught")
    ver.set_defaults(func=cmd_verify)

    ben = sub.add_parser("bench", help="cutoff scaling and sampled cost table")
    ben.add_argument("--ts", default="1,10,100,1000")
    ben.add_argument("--epsilons", default="0.01")
    ben.add_argument("--draws", type=int, default=10000)
    ben.add_argument("--seed", type=int, default=7)
    ben.add_argument("--csv-out", default=None)
    ben.set_defaults(func=cmd_bench)

    qpe = sub.add_parser("qpe", help="eigenvalue estimation from readout statistics")
    qpe.add_argument("--config", required=True)
    qpe.add_argument("--t", type=float, default=None)
    qpe.add_argument("--shots", type=int, default=None)
    qpe.add_argument("--seed", type=int, default=None)
    qpe.add_argument("--eigen-index", type=int, default=None)
    qpe.add_argument("--csv-out", default=None)
    qpe.set_defaults(func=cmd_qpe)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
