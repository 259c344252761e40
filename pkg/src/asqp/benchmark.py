"""Chain-of-masses closed-loop benchmark.

A chain of unit masses coupled by unit springs between two walls, each mass
forced and measured, tracks phase-shifted sinusoids under the integral-
action controller.  The harness logs per-sample solver statistics and KKT
accuracy measures and serializes runs as self-describing CSV.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, SolverFailure, WindowOutOfRange
from .mpc import (CtModel, DiscreteModel, Limits, MpcPlan, assemble_qp, augment,
                  discretize_zoh, make_plan)
from .solver import QpProblem, QpSolution, SolverOptions, solve

CSV_SCHEMA_VERSION = 1

_MASK64 = (1 << 64) - 1


def build_mass_chain(n_masses: int) -> CtModel:
    """Continuous model of ``n_masses`` unit masses on unit springs between
    two walls: positions stacked over velocities, every mass forced and its
    position measured."""
    if n_masses < 1:
        raise ValueError("need at least one mass")
    n = int(n_masses)
    coupling = -2.0 * np.eye(n)
    idx = np.arange(n - 1)
    coupling[idx, idx + 1] = 1.0
    coupling[idx + 1, idx] = 1.0
    a_c = np.block([[np.zeros((n, n)), np.eye(n)], [coupling, np.zeros((n, n))]])
    b_c = np.vstack([np.zeros((n, n)), np.eye(n)])
    c_c = np.hstack([np.eye(n), np.zeros((n, n))])
    return CtModel(a_c=a_c, b_c=b_c, c_c=c_c)


@dataclass
class SinusoidReference:
    """Per-channel sinusoid with the linear phase progression
    phase(i) = 0.9 * (2 i / (n_outputs - 1)) * pi for channel i (0-based).

    Needs at least two channels for the phase rule; a single channel falls
    back to zero phase (degenerate special case).
    """

    amplitude: float
    frequency: float
    n_outputs: int

    def phase(self, channel: int) -> float:
        if self.n_outputs < 2:
            return 0.0
        return 0.9 * (2.0 * channel / (self.n_outputs - 1)) * math.pi

    def sample(self, t: float) -> np.ndarray:
        ch = np.arange(self.n_outputs)
        if self.n_outputs < 2:
            phases = np.zeros(1)
        else:
            phases = 0.9 * (2.0 * ch / (self.n_outputs - 1)) * math.pi
        return self.amplitude * np.sin(2.0 * math.pi * self.frequency * t - phases)


@dataclass
class ConstantReference:
    """Fixed setpoint on every channel."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(-1)

    @property
    def n_outputs(self) -> int:
        return self.values.size

    def sample(self, t: float) -> np.ndarray:
        return self.values.copy()


def reference_at(spec: SinusoidReference, channel: int, t: float) -> float:
    """Reference value of one channel (0-based) at time ``t`` seconds."""
    if not 0 <= channel < spec.n_outputs:
        raise IndexError(f"channel {channel} outside [0, {spec.n_outputs})")
    return spec.amplitude * math.sin(2.0 * math.pi * spec.frequency * t - spec.phase(channel))


def plant_step(model: DiscreteModel, x_p, u):
    """Advance the discrete plant one sample; returns (x_next, y_current)."""
    x_p = np.asarray(x_p, dtype=float)
    u = np.asarray(u, dtype=float)
    if x_p.shape != (model.a_d.shape[0],) or u.shape != (model.b_d.shape[1],):
        raise DimensionMismatch("plant state/input dimensions inconsistent with the model")
    y = model.c_d @ x_p
    x_next = model.a_d @ x_p + model.b_d @ u + model.w_d
    return x_next, y


def splitmix64_uniform(seed: int, count: int) -> np.ndarray:
    """Deterministic uniforms in [0, 1) from the splitmix64 mixer.

    Documented generator: state += 0x9E3779B97F4A7C15; z = state;
    z = (z ^ z>>30) * 0xBF58476D1CE4E5B9; z = (z ^ z>>27) * 0x94D049BB133111EB;
    output (z ^ z>>31) / 2^64.  All arithmetic modulo 2^64.
    """
    state = int(seed) & _MASK64
    out = np.empty(count)
    for i in range(count):
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        out[i] = ((z ^ (z >> 31)) & _MASK64) / 2.0**64
    return out


def initial_positions(seed: int, n_masses: int, low: float = -1.2, high: float = 1.2):
    return low + (high - low) * splitmix64_uniform(seed, n_masses)


@dataclass
class AccuracyReport:
    """KKT accuracy measures of one solve (all non-negative)."""

    stationarity: float
    primal_feasibility: float
    dual_feasibility: float
    complementary_slackness: float
    error_vs_reference: Optional[float] = None


@dataclass
class SimRecord:
    """One closed-loop sample: plant state, signals, solver statistics,
    accuracy.  The CSV serialization omits the state (fixed schema)."""

    k: int
    t: float
    x_p: np.ndarray
    y: np.ndarray
    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    solve_ns: int
    m_star: int
    c_star: int
    dependent_adds: int
    plain_adds: int
    removals: int
    accuracy: AccuracyReport


@dataclass
class RunAggregate:
    """Windowed series statistics; min <= avg <= max by construction."""

    avg: float
    max: float
    min: float


@dataclass
class BenchConfig:
    """Closed-loop scenario; defaults are the six-mass stress preset
    (N=27, Ts=4 ms, Q=210 I, R=0.008 I, P=45 Q, rate/input boxes, huge
    output box, unlimited solver iterations, 1.2 m / (1/30) Hz sinusoids,
    17500 samples)."""

    n_masses: int = 6
    n_horizon: int = 27
    ts: float = 0.004
    q_weight: float = 210.0
    r_weight: float = 0.008
    p_factor: float = 45.0
    du_min: float = -0.5
    du_max: float = 0.5
    u_min: float = -1.0
    u_max: float = 1.0
    y_min: float = -1e6
    y_max: float = 1e6
    amplitude: float = 1.2
    frequency: float = 1.0 / 30.0
    steps: int = 17500
    seed: int = 1
    eps_q: float = 1e-11
    max_iter: float = math.inf
    backend: str = "auto"
    reference: object = None  # defaults to the sinusoid family above
    record_kkt: bool = True

    def solver_options(self) -> SolverOptions:
        return SolverOptions(eps_q=self.eps_q, max_iter=self.max_iter, backend=self.backend)

    def limits(self) -> Limits:
        return Limits(du_min=self.du_min, du_max=self.du_max, u_min=self.u_min,
                      u_max=self.u_max, y_min=self.y_min, y_max=self.y_max)

    def reference_signal(self):
        if self.reference is not None:
            return self.reference
        return SinusoidReference(self.amplitude, self.frequency, self.n_masses)

    def echo(self) -> dict:
        return {
            "schema_version": CSV_SCHEMA_VERSION,
            "n_masses": self.n_masses, "n_horizon": self.n_horizon, "ts": self.ts,
            "q_weight": self.q_weight, "r_weight": self.r_weight,
            "p_factor": self.p_factor,
            "du_min": self.du_min, "du_max": self.du_max,
            "u_min": self.u_min, "u_max": self.u_max,
            "y_min": self.y_min, "y_max": self.y_max,
            "amplitude": self.amplitude, "frequency": self.frequency,
            "steps": self.steps, "seed": self.seed,
            "eps_q": self.eps_q, "max_iter": self.max_iter,
        }


@dataclass
class RunResult:
    """Records plus the config echo needed for self-describing output."""

    config: dict
    records: list
    plan: MpcPlan = None

    def series(self, picker) -> np.ndarray:
        return np.array([picker(rec) for rec in self.records])


def accuracy_measures(prob: QpProblem, sol: QpSolution, theta_ref=None) -> AccuracyReport:
    """Table-style KKT measures: 2-norm stationarity residual, 2-norm of
    positive constraint violations, 2-norm of negative multipliers, absolute
    complementarity product, and optional distance to a reference solution."""
    lam = sol.scatter_multipliers(prob.p)
    theta = sol.theta
    stat = float(np.linalg.norm(prob.e_factored.matvec(theta) + prob.grad
                                + prob.constraints.T @ lam))
    slack = prob.constraints @ theta - prob.bounds
    viol = slack[slack > 0.0]
    primal = float(np.linalg.norm(viol)) if viol.size else 0.0
    neg = lam[lam < 0.0]
    dual = float(np.linalg.norm(neg)) if neg.size else 0.0
    comp = float(abs(lam @ slack))
    err = None
    if theta_ref is not None:
        err = float(np.linalg.norm(theta - np.asarray(theta_ref, dtype=float)))
    return AccuracyReport(stat, primal, dual, comp, err)


def aggregate(values, k_a: int, k_b: int) -> RunAggregate:
    """Average, max, and min of a series over the 1-indexed inclusive
    window [k_a, k_b]."""
    values = np.asarray(values, dtype=float)
    if not 1 <= k_a < k_b <= values.size:
        raise WindowOutOfRange(
            f"window [{k_a}, {k_b}] invalid for a series of {values.size} samples")
    window = values[k_a - 1 : k_b]
    return RunAggregate(avg=float(window.mean()), max=float(window.max()),
                        min=float(window.min()))


def run_closed_loop(cfg: BenchConfig) -> RunResult:
    """Simulate the scenario: discretize and augment the chain, build the
    plan, then per sample assemble the QP from [x_p - x_p_prev; y], solve
    cold-started, apply the first move, and advance the plant.

    Initial positions are seeded uniforms in [-1.2, 1.2], initial
    velocities zero, u(-1) = 0 and delta x_p(0) = 0.  A non-optimal solver
    status halts the run with SolverFailure.
    """
    ct = build_mass_chain(cfg.n_masses)
    dt_model = discretize_zoh(ct, cfg.ts)
    aug = augment(dt_model)
    n_u, n_y = aug.n_inputs, aug.n_outputs
    q = cfg.q_weight * np.eye(n_y)
    r = cfg.r_weight * np.eye(n_u)
    p_term = cfg.p_factor * q
    plan = make_plan(aug, cfg.n_horizon, q, r, p_term, cfg.limits())
    reference = cfg.reference_signal()
    if reference.n_outputs != n_y:
        raise DimensionMismatch(
            f"reference has {reference.n_outputs} channels, plant has {n_y}")
    opts = cfg.solver_options()
    ws = plan.workspace()

    x_p = np.concatenate([initial_positions(cfg.seed, cfg.n_masses), np.zeros(cfg.n_masses)])
    x_prev = x_p.copy()
    u_prev = np.zeros(n_u)
    horizon = cfg.n_horizon
    records = []
    for k in range(cfg.steps):
        t_k = k * cfg.ts
        y_k = dt_model.c_d @ x_p
        x_aug = np.concatenate([x_p - x_prev, y_k])
        preview = np.concatenate(
            [reference.sample((k + i) * cfg.ts) for i in range(1, horizon + 1)])
        prob = assemble_qp(plan, x_aug, preview, u_prev)
        tic = time.perf_counter_ns()
        sol = solve(prob, opts, workspace=ws)
        solve_ns = time.perf_counter_ns() - tic
        if not sol.is_optimal:
            raise SolverFailure(
                f"solver returned {sol.status.value} at sample {k}", step=k, status=sol.status)
        du = sol.theta[:n_u].copy()
        u = u_prev + du
        if cfg.record_kkt:
            accuracy = accuracy_measures(prob, sol)
        else:
            accuracy = AccuracyReport(math.nan, math.nan, math.nan, math.nan)
        records.append(SimRecord(
            k=k, t=t_k, x_p=x_p.copy(), y=y_k, r=reference.sample(t_k),
            u=u.copy(), du=du,
            solve_ns=int(solve_ns), m_star=sol.m_star, c_star=sol.c_star,
            dependent_adds=sol.events.dependent_adds,
            plain_adds=sol.events.plain_adds, removals=sol.events.removals,
            accuracy=accuracy))
        x_next, _ = plant_step(dt_model, x_p, u)
        x_prev = x_p
        x_p = x_next
        u_prev = u
    config = cfg.echo()
    config["p"] = plan.n_constraints
    config["n_u"] = n_u
    config["n_y"] = n_y
    return RunResult(config=config, records=records, plan=plan)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    xf = float(x)
    if math.isnan(xf):
        return "nan"
    return format(xf, ".17g")


def csv_header(n_u: int, n_y: int) -> list:
    cols = ["k", "t"]
    cols += [f"y_{i+1}" for i in range(n_y)]
    cols += [f"r_{i+1}" for i in range(n_y)]
    cols += [f"u_{i+1}" for i in range(n_u)]
    cols += [f"du_{i+1}" for i in range(n_u)]
    cols += ["solve_ns", "m_star", "c_star", "t_l", "t_a", "t_r",
             "stationarity", "primal_feas", "dual_feas", "comp_slack", "err_vs_ref"]
    return cols


def write_csv(result: RunResult, fh):
    """Self-describing per-run CSV: `# key=value` header lines with the full
    config and seed, one fixed-order data row per sample, floats at 17
    significant digits."""
    for key in sorted(result.config):
        fh.write(f"# {key}={result.config[key]}\n")
    n_u, n_y = result.config["n_u"], result.config["n_y"]
    fh.write(",".join(csv_header(n_u, n_y)) + "\n")
    for rec in result.records:
        acc = rec.accuracy
        row = [rec.k, rec.t, *rec.y, *rec.r, *rec.u, *rec.du,
               rec.solve_ns, rec.m_star, rec.c_star,
               rec.dependent_adds, rec.plain_adds, rec.removals,
               acc.stationarity, acc.primal_feasibility, acc.dual_feasibility,
               acc.complementary_slackness,
               math.nan if acc.error_vs_reference is None else acc.error_vs_reference]
        fh.write(",".join(_fmt(v) for v in row) + "\n")


def summarize_run(result: RunResult, k_a: int = 33, k_b: int | None = None) -> dict:
    """Sweep-style summary: windowed solve-time aggregates (the first
    samples are skipped by default because they carry warm-up spikes) plus
    whole-run averages of the solver statistics and accuracy measures."""
    n = len(result.records)
    if n == 0:
        return {"steps": 0}
    if k_b is None:
        k_b = n
    k_a = min(max(1, k_a), max(1, n - 1))
    solve_ns = result.series(lambda rec: rec.solve_ns)
    timing = aggregate(solve_ns, k_a, k_b) if n > 1 else RunAggregate(
        float(solve_ns[0]), float(solve_ns[0]), float(solve_ns[0]))
    out = {
        "steps": n,
        "p": result.config.get("p"),
        "avg_solve_ns": timing.avg,
        "max_solve_ns": timing.max,
        "min_solve_ns": timing.min,
        "total_solve_ns": float(solve_ns.sum()),
        "avg_c_star": float(result.series(lambda rec: rec.c_star).mean()),
        "avg_m_star": float(result.series(lambda rec: rec.m_star).mean()),
        "avg_stationarity": float(result.series(lambda rec: rec.accuracy.stationarity).mean()),
        "avg_primal_feas": float(
            result.series(lambda rec: rec.accuracy.primal_feasibility).mean()),
        "avg_dual_feas": float(result.series(lambda rec: rec.accuracy.dual_feasibility).mean()),
        "avg_comp_slack": float(
            result.series(lambda rec: rec.accuracy.complementary_slackness).mean()),
    }
    return out
