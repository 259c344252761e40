"""Command-line front end: solve QP files, cross-check against the
reference solvers, run closed-loop benchmarks and horizon sweeps, and print
the stored-number footprint table.

Exit codes: 0 success/optimal, 1 usage or parse errors (and failed
verification), 2 infeasible, 3 iteration-limit or cycle-guard statuses.
"""

from __future__ import annotations

import argparse
import io
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .benchmark import (BenchConfig, accuracy_measures, run_closed_loop,
                        summarize_run, write_csv)
from .errors import AsqpError, ParseError, SizeLimit, SolverFailure
from .qpfile import load_qp_file
from .reference import HildrethOptions, enumerate_active_sets, hildreth_solve
from .solver import (SolveStatus, SolverOptions, footprint_sizes, memory_footprint,
                     solve)

_STATUS_EXIT = {
    SolveStatus.OPTIMAL: 0,
    SolveStatus.INFEASIBLE: 2,
    SolveStatus.ITERATION_LIMIT: 3,
    SolveStatus.CYCLE_GUARD: 3,
}


def _fmt_vec(values) -> str:
    return " ".join(format(float(v), ".12g") for v in values)


def _solver_options(args) -> SolverOptions:
    max_iter = None if args.max_iter is None else float(args.max_iter)
    return SolverOptions(eps_q=args.eps_q, max_iter=max_iter)


def cmd_solve(args) -> int:
    doc = load_qp_file(args.path)
    prob = doc.to_problem()
    sol = solve(prob, _solver_options(args))
    print(f"status: {sol.status.value}")
    print(f"theta: {_fmt_vec(sol.theta)}")
    print(f"active (1-based): {' '.join(str(int(i) + 1) for i in sol.active)}")
    print(f"lambda_active: {_fmt_vec(sol.lambda_active)}")
    print(f"c_star: {sol.c_star}")
    print(f"m_star: {sol.m_star}")
    print(f"events: t_l={sol.events.dependent_adds} t_a={sol.events.plain_adds} "
          f"t_r={sol.events.removals}")
    if sol.status is SolveStatus.INFEASIBLE:
        print("certificate: dependence scalar q ~ 0 with all combination weights <= 0")
    acc = accuracy_measures(prob, sol)
    print(f"stationarity: {acc.stationarity:.6e}")
    print(f"primal_feasibility: {acc.primal_feasibility:.6e}")
    print(f"dual_feasibility: {acc.dual_feasibility:.6e}")
    print(f"complementary_slackness: {acc.complementary_slackness:.6e}")
    return _STATUS_EXIT[sol.status]


def cmd_verify(args) -> int:
    doc = load_qp_file(args.path)
    prob = doc.to_problem()
    sol = solve(prob, _solver_options(args))
    oracle = enumerate_active_sets(prob)
    hil = hildreth_solve(prob, HildrethOptions(tol=1e-12, max_iter=200000))
    hildreth_ok = hil.status is SolveStatus.OPTIMAL
    if not hildreth_ok:
        print("hildreth: non-convergent (excluded from the vote)")
    infeasible_votes = {sol.status is SolveStatus.INFEASIBLE,
                        oracle.status is SolveStatus.INFEASIBLE}
    if infeasible_votes == {True}:
        print("verdict: unanimous infeasible")
        return 0
    if infeasible_votes == {True, False}:
        print(f"verdict: DISAGREE on feasibility (solver={sol.status.value}, "
              f"oracle={oracle.status.value})")
        return 1
    err_oracle = float(np.linalg.norm(sol.theta - oracle.theta))
    print(f"solver vs oracle: |dtheta| = {err_oracle:.3e} (tolerance 1e-7)")
    ok = err_oracle <= 1e-7
    if hildreth_ok:
        err_h = float(np.linalg.norm(sol.theta - hil.theta))
        err_ho = float(np.linalg.norm(oracle.theta - hil.theta))
        print(f"solver vs hildreth: |dtheta| = {err_h:.3e} (tolerance 1e-5)")
        print(f"oracle vs hildreth: |dtheta| = {err_ho:.3e} (tolerance 1e-5)")
        ok = ok and err_h <= 1e-5 and err_ho <= 1e-5
    print(f"verdict: {'agree' if ok else 'DISAGREE'}")
    return 0 if ok else 1


def _parse_range(text: str):
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
        if lo < 1 or hi < lo:
            raise ValueError(f"bad range {text!r}")
        return list(range(lo, hi + 1))
    value = int(text)
    if value < 1:
        raise ValueError(f"bad range {text!r}")
    return [value]


def _bench_config(args, n_horizon: int, seed: int, record_kkt: bool) -> BenchConfig:
    return BenchConfig(
        n_masses=args.masses, n_horizon=n_horizon, ts=args.ts,
        q_weight=args.q_weight, r_weight=args.r_weight,
        steps=args.steps, seed=seed, eps_q=args.eps_q,
        max_iter=math.inf if args.max_iter is None else float(args.max_iter),
        record_kkt=record_kkt)


def _bench_job(cfg: BenchConfig):
    result = run_closed_loop(cfg)
    buf = io.StringIO()
    write_csv(result, buf)
    summary = summarize_run(result)
    summary["N"] = cfg.n_horizon
    summary["seed"] = cfg.seed
    return cfg.n_horizon, cfg.seed, buf.getvalue(), summary


_SUMMARY_COLS = ["N", "seed", "p", "steps", "avg_solve_ns", "max_solve_ns",
                 "min_solve_ns", "total_solve_ns", "avg_c_star", "avg_m_star",
                 "avg_stationarity", "avg_primal_feas", "avg_dual_feas",
                 "avg_comp_slack"]


def _summary_csv(rows) -> str:
    lines = [",".join(_SUMMARY_COLS)]
    for row in rows:
        lines.append(",".join(format(row.get(col, float("nan"))) for col in _SUMMARY_COLS))
    return "\n".join(lines) + "\n"


def cmd_bench(args) -> int:
    horizons = _parse_range(args.sweep_n) if args.sweep_n else [args.n_horizon]
    seeds = [int(s) for s in args.seeds.split(",")] if args.seeds else [args.seed]
    multi = len(horizons) > 1 or len(seeds) > 1
    record_kkt = args.report == "kkt" or not multi
    jobs = [_bench_config(args, n, seed, record_kkt) for n in horizons for seed in seeds]

    if args.out:
        os.makedirs(args.out, exist_ok=True)
        workers = min(len(jobs), os.cpu_count() or 1)
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                outputs = list(pool.map(_bench_job, jobs))
        else:
            outputs = [_bench_job(cfg) for cfg in jobs]
        outputs.sort(key=lambda item: (item[0], item[1]))
        rows = []
        for n, seed, csv_text, summary in outputs:
            path = os.path.join(args.out, f"bench_N{n:03d}_seed{seed}.csv")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(csv_text)
            rows.append(summary)
        summary_text = _summary_csv(rows)
        with open(os.path.join(args.out, "summary.csv"), "w", encoding="utf-8") as fh:
            fh.write(summary_text)
        sys.stdout.write(summary_text)
        return 0

    rows = []
    for cfg in jobs:
        n, seed, csv_text, summary = _bench_job(cfg)
        sys.stdout.write(csv_text)
        rows.append(summary)
    if multi:
        sys.stdout.write(_summary_csv(rows))
    return 0


def cmd_footprint(args) -> int:
    horizons = _parse_range(args.range)
    print(f"{'N':>4} {'p':>6} {'w':>6} {'this_solver':>12} {'qpoases':>12}")
    for n in horizons:
        ours, reference = memory_footprint(n)
        p, w = footprint_sizes(n)
        print(f"{n:>4} {p:>6} {w:>6} {ours:>12} {reference:>12}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asqp",
        description="Dense active-set QP solver with MPC benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    def common_solver_flags(p):
        p.add_argument("--eps-q", type=float, default=1e-11,
                       help="linear-dependence tolerance (default 1e-11)")
        p.add_argument("--max-iter", type=int, default=None,
                       help="iteration cap (default 3p)")

    p_solve = sub.add_parser("solve", help="solve a QP document")
    p_solve.add_argument("path")
    common_solver_flags(p_solve)
    p_solve.add_argument("--report", choices=["kkt"], default="kkt")
    p_solve.set_defaults(func=cmd_solve)

    p_verify = sub.add_parser("verify", help="cross-check a small QP against the oracles")
    p_verify.add_argument("path")
    common_solver_flags(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    p_bench = sub.add_parser("bench", help="closed-loop mass-chain benchmark (CSV output)")
    p_bench.add_argument("--masses", type=int, default=6)
    p_bench.add_argument("--N", dest="n_horizon", type=int, default=27)
    p_bench.add_argument("--steps", type=int, default=17500)
    p_bench.add_argument("--ts", type=float, default=0.004)
    p_bench.add_argument("--q-weight", type=float, default=210.0)
    p_bench.add_argument("--r-weight", type=float, default=0.008)
    p_bench.add_argument("--seed", type=int, default=1)
    p_bench.add_argument("--seeds", default=None, help="comma-separated seed list")
    p_bench.add_argument("--sweep-N", dest="sweep_n", default=None,
                         help="horizon range a..b; one CSV per N plus a summary")
    p_bench.add_argument("--out", default=None, help="directory for per-run CSV files")
    p_bench.add_argument("--report", choices=["kkt"], default=None,
                         help="record KKT measures even in sweeps")
    common_solver_flags(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    p_foot = sub.add_parser("footprint", help="stored-number footprint per horizon")
    p_foot.add_argument("range", help="horizon N or range a..b")
    p_foot.set_defaults(func=cmd_footprint)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    except SizeLimit as exc:
        print(f"size limit: {exc}", file=sys.stderr)
        return 1
    except SolverFailure as exc:
        print(f"benchmark halted: {exc} (step {exc.step})", file=sys.stderr)
        return 3
    except (AsqpError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
