"""Compare the compiled update-loop kernel against the NumPy fallback.

Times cold-started solves of MPC-shaped problems at several horizons on
both backends and prints a small table.  Run from the repository root:

    python benchmarks/backend_bench.py [--steps 40] [--masses 6]
"""

import argparse
import statistics
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import numpy as np

from asqp import native_backend_available
from asqp.benchmark import BenchConfig, build_mass_chain, initial_positions
from asqp.mpc import assemble_qp, augment, discretize_zoh, make_plan
from asqp.solver import SolverOptions, solve


def time_backend(cfg: BenchConfig, backend: str, steps: int):
    ct = build_mass_chain(cfg.n_masses)
    dt_model = discretize_zoh(ct, cfg.ts)
    aug = augment(dt_model)
    q = cfg.q_weight * np.eye(aug.n_outputs)
    r = cfg.r_weight * np.eye(aug.n_inputs)
    plan = make_plan(aug, cfg.n_horizon, q, r, cfg.p_factor * q, cfg.limits())
    reference = cfg.reference_signal()
    opts = SolverOptions(eps_q=cfg.eps_q, max_iter=cfg.max_iter, backend=backend)
    ws = plan.workspace()

    x_p = np.concatenate([initial_positions(cfg.seed, cfg.n_masses),
                          np.zeros(cfg.n_masses)])
    x_prev = x_p.copy()
    u_prev = np.zeros(aug.n_inputs)
    times = []
    iters = []
    for k in range(steps):
        y_k = dt_model.c_d @ x_p
        x_aug = np.concatenate([x_p - x_prev, y_k])
        preview = np.concatenate(
            [reference.sample((k + i) * cfg.ts) for i in range(1, cfg.n_horizon + 1)])
        prob = assemble_qp(plan, x_aug, preview, u_prev)
        tic = time.perf_counter_ns()
        sol = solve(prob, opts, workspace=ws)
        times.append((time.perf_counter_ns() - tic) / 1e6)
        iters.append(sol.m_star)
        du = sol.theta[: aug.n_inputs]
        u = u_prev + du
        x_prev = x_p
        x_p = dt_model.a_d @ x_p + dt_model.b_d @ u + dt_model.w_d
        u_prev = u
    return times, iters


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=40)
    parser.add_argument("--masses", type=int, default=6)
    parser.add_argument("--horizons", default="8,16,27")
    args = parser.parse_args()

    backends = ["python"]
    if native_backend_available():
        backends.insert(0, "native")
    else:
        print("note: compiled kernel not built; timing the fallback only\n")

    horizons = [int(h) for h in args.horizons.split(",")]
    print(f"{args.masses}-mass chain, {args.steps} closed-loop solves per cell "
          f"(cold-started), milliseconds per solve\n")
    header = f"{'N':>4} {'p':>6} {'n':>5}" + "".join(
        f"  {b + ' med':>12} {b + ' max':>12}" for b in backends)
    print(header)
    speedups = []
    for n_h in horizons:
        cfg = BenchConfig(n_masses=args.masses, n_horizon=n_h, steps=args.steps)
        row = {}
        for backend in backends:
            times, iters = time_backend(cfg, backend, args.steps)
            row[backend] = (statistics.median(times), max(times))
        p = 2 * (n_h + 1) * args.masses + 4 * n_h * args.masses
        cells = "".join(f"  {row[b][0]:>12.3f} {row[b][1]:>12.3f}" for b in backends)
        print(f"{n_h:>4} {p:>6} {n_h * args.masses:>5}{cells}")
        if len(backends) == 2:
            speedups.append(row["python"][0] / row["native"][0])
    if speedups:
        print(f"\nmedian speedup native vs python: "
              f"{statistics.median(speedups):.1f}x")


if __name__ == "__main__":
    main()
