"""Integral-action linear MPC condensing.

Pipeline: zero-order-hold discretization of a continuous model (with an
optional affine drift folded into the input), augmentation to incremental
form (state = [delta x_p; y], input = delta u, which bakes in integral
action), stacked prediction/cost/constraint matrices over the horizon, and
per-step assembly of the dense QP handed to the solver.  Everything that
does not depend on the current state is built once, offline.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import block_diag, expm

from .errors import DimensionMismatch, NotPositiveDefinite, PivotBreakdown
from .linalg import FactoredSpd, dual_hessian, factorize_spd
from .solver import QpProblem, QpSolution, SolverOptions, SolverWorkspace, solve


def _as_matrix(a, name):
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be a matrix, got ndim {a.ndim}")
    return a


@dataclass
class CtModel:
    """Continuous-time model x' = A_c x + B_c u + w_c, y = C_c x.

    Direct feedthrough is structurally zero (the incremental formulation
    assumes the input cannot affect the output within the same sample).
    """

    a_c: np.ndarray
    b_c: np.ndarray
    c_c: np.ndarray
    w_c: np.ndarray | None = None

    def __post_init__(self):
        self.a_c = _as_matrix(self.a_c, "a_c")
        self.b_c = _as_matrix(self.b_c, "b_c")
        self.c_c = _as_matrix(self.c_c, "c_c")
        nxp = self.a_c.shape[0]
        if self.a_c.shape != (nxp, nxp):
            raise DimensionMismatch("a_c must be square")
        if self.b_c.shape[0] != nxp or self.c_c.shape[1] != nxp:
            raise DimensionMismatch("b_c/c_c dimensions inconsistent with a_c")
        if self.w_c is None:
            self.w_c = np.zeros(nxp)
        else:
            self.w_c = np.asarray(self.w_c, dtype=float).reshape(-1)
            if self.w_c.shape != (nxp,):
                raise DimensionMismatch("w_c length inconsistent with a_c")

    @property
    def n_states(self) -> int:
        return self.a_c.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.b_c.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.c_c.shape[0]


class DiscreteModel(NamedTuple):
    """Zero-order-hold discretization x+ = A_d x + B_d u + w_d, y = C_d x."""

    a_d: np.ndarray
    b_d: np.ndarray
    w_d: np.ndarray
    c_d: np.ndarray


@dataclass
class DtAugModel:
    """Incremental-form augmented model built from a discrete one.

    State is [delta x_p; y]; the affine drift cancels in the difference and
    does not appear.  A = [[A_d, 0], [C_d A_d, I]], B = [B_d; C_d B_d],
    C = [0, I].
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    a_d: np.ndarray
    b_d: np.ndarray
    c_d: np.ndarray
    w_d: np.ndarray

    @property
    def n_states(self) -> int:
        return self.a.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.b.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.c.shape[0]


@dataclass
class Limits:
    """Box limits on the input rate, input, and output; scalars broadcast."""

    du_min: float | np.ndarray
    du_max: float | np.ndarray
    u_min: float | np.ndarray
    u_max: float | np.ndarray
    y_min: float | np.ndarray
    y_max: float | np.ndarray

    def resolved(self, n_u: int, n_y: int):
        def vec(v, size, name):
            arr = np.asarray(v, dtype=float).reshape(-1)
            if arr.size == 1:
                arr = np.full(size, arr[0])
            if arr.shape != (size,):
                raise DimensionMismatch(f"{name} must be scalar or length {size}")
            return arr

        du_lo, du_hi = vec(self.du_min, n_u, "du_min"), vec(self.du_max, n_u, "du_max")
        u_lo, u_hi = vec(self.u_min, n_u, "u_min"), vec(self.u_max, n_u, "u_max")
        y_lo, y_hi = vec(self.y_min, n_y, "y_min"), vec(self.y_max, n_y, "y_max")
        for lo, hi, name in ((du_lo, du_hi, "du"), (u_lo, u_hi, "u"), (y_lo, y_hi, "y")):
            if not np.all(lo < hi):
                raise ValueError(f"{name} limits must satisfy min < max elementwise")
        return du_lo, du_hi, u_lo, u_hi, y_lo, y_hi


@dataclass
class MpcPlan:
    """Offline condensing products reused at every sample."""

    n_horizon: int
    aug: DtAugModel
    phi: np.ndarray
    gamma_mat: np.ndarray
    omega: np.ndarray
    psi: np.ndarray
    e_mat: np.ndarray
    e_factored: FactoredSpd
    f_gain: np.ndarray          # 2 Gamma' Omega; F = f_gain @ (phi x - r)
    constraint_l: np.ndarray
    constraint_d: np.ndarray
    constraint_w: np.ndarray
    constraint_v: np.ndarray
    dual_h: np.ndarray
    w_cap: int
    limits: Limits

    @property
    def n_inputs(self) -> int:
        return self.aug.n_inputs

    @property
    def n_outputs(self) -> int:
        return self.aug.n_outputs

    @property
    def n_constraints(self) -> int:
        return self.constraint_l.shape[0]

    def workspace(self) -> SolverWorkspace:
        return SolverWorkspace(self.e_factored.n, self.n_constraints, self.w_cap)


@dataclass
class ObserverGain:
    """Output-injection gain; (A - LC) must be Schur stable."""

    l_gain: np.ndarray


def discretize_zoh(ct: CtModel, ts: float) -> DiscreteModel:
    """Exact zero-order-hold discretization via the matrix exponential of
    the block [[A_c, [B_c w_c]], [0, 0]] scaled by the sampling period."""
    if ts <= 0:
        raise ValueError("sampling period must be positive")
    nxp, nu = ct.n_states, ct.n_inputs
    baug = np.hstack([ct.b_c, ct.w_c[:, None]])
    blk = np.zeros((nxp + nu + 1, nxp + nu + 1))
    blk[:nxp, :nxp] = ct.a_c
    blk[:nxp, nxp:] = baug
    phi = expm(blk * ts)
    a_d = phi[:nxp, :nxp]
    bw = phi[:nxp, nxp:]
    return DiscreteModel(a_d=a_d, b_d=bw[:, :nu], w_d=bw[:, nu], c_d=ct.c_c.copy())


def augment(dt: DiscreteModel) -> DtAugModel:
    """Lift a discrete model to the incremental form of the plan."""
    a_d, b_d, w_d, c_d = (np.asarray(x, dtype=float) for x in dt)
    nxp = a_d.shape[0]
    if a_d.shape != (nxp, nxp) or b_d.shape[0] != nxp or c_d.shape[1] != nxp:
        raise DimensionMismatch("discrete model dimensions are inconsistent")
    n_y = c_d.shape[0]
    n_u = b_d.shape[1]
    a = np.zeros((nxp + n_y, nxp + n_y))
    a[:nxp, :nxp] = a_d
    a[nxp:, :nxp] = c_d @ a_d
    a[nxp:, nxp:] = np.eye(n_y)
    b = np.vstack([b_d, c_d @ b_d])
    c = np.hstack([np.zeros((n_y, nxp)), np.eye(n_y)])
    return DtAugModel(a=a, b=b, c=c, a_d=a_d, b_d=b_d, c_d=c_d, w_d=w_d.reshape(-1))


def build_prediction(aug: DtAugModel, n_horizon: int):
    """Stacked output predictor: Y = phi x(k) + gamma dU with row blocks
    C A^i and lower block-triangular blocks C A^{i-j} B."""
    if n_horizon < 1:
        raise ValueError("horizon must be at least 1")
    n_x, n_u, n_y = aug.n_states, aug.n_inputs, aug.n_outputs
    n = int(n_horizon)
    powers = [np.eye(n_x)]
    for _ in range(n):
        powers.append(aug.a @ powers[-1])
    phi = np.vstack([aug.c @ powers[i] for i in range(1, n + 1)])
    gamma = np.zeros((n * n_y, n * n_u))
    markov = [aug.c @ (powers[i] @ aug.b) for i in range(n)]
    for i in range(n):
        for j in range(i + 1):
            gamma[i * n_y : (i + 1) * n_y, j * n_u : (j + 1) * n_u] = markov[i - j]
    return phi, gamma


def build_cost(phi, gamma, q, r, p_term, n_horizon):
    """Condensed Hessian and stacked weights: omega = diag(Q,...,Q,P),
    psi = diag(R,...,R), E = 2(psi + gamma' omega gamma)."""
    q = _as_matrix(q, "q")
    r = _as_matrix(r, "r")
    p_term = _as_matrix(p_term, "p_term")
    n = int(n_horizon)
    omega = block_diag(*([q] * (n - 1) + [p_term])) if n > 1 else p_term.copy()
    psi = block_diag(*([r] * n))
    e = 2.0 * (psi + gamma.T @ omega @ gamma)
    try:
        factorize_spd(e)
    except PivotBreakdown as exc:
        raise NotPositiveDefinite(f"condensed Hessian is not positive definite: {exc}") from exc
    return e, omega, psi


def build_constraints(aug: DtAugModel, phi, gamma, n_horizon, limits: Limits):
    """Stack the rate/input/output boxes into L dU <= d + W x + V u_prev.

    Stage blocks carry the rate and output boxes (output rows composed with
    the predictor), a terminal block carries the final output box, and the
    cumulative-sum blocks map input boxes onto the rate decision variables.
    """
    n = int(n_horizon)
    n_u, n_y = aug.n_inputs, aug.n_outputs
    n_x = aug.n_states
    du_lo, du_hi, u_lo, u_hi, y_lo, y_hi = limits.resolved(n_u, n_y)

    rows_stage = 2 * n_u + 2 * n_y
    rows_y = n * rows_stage + 2 * n_y
    z_i = np.vstack([-np.eye(n_u), np.eye(n_u), np.zeros((2 * n_y, n_u))])
    t_i = np.vstack([np.zeros((2 * n_u, n_y)), -np.eye(n_y), np.eye(n_y)])
    b_i = np.concatenate([-du_lo, du_hi, -y_lo, y_hi])
    t_n = np.vstack([-np.eye(n_y), np.eye(n_y)])
    b_n = np.concatenate([-y_lo, y_hi])

    z_stack = np.zeros((rows_y, n * n_u))
    d_stack = np.zeros((rows_y, n_x))
    t_stack = np.zeros((rows_y, n * n_y))
    c_stack = np.zeros(rows_y)
    for i in range(n):
        r0 = i * rows_stage
        z_stack[r0 : r0 + rows_stage, i * n_u : (i + 1) * n_u] = z_i
        c_stack[r0 : r0 + rows_stage] = b_i
        if i >= 1:
            t_stack[r0 : r0 + rows_stage, (i - 1) * n_y : i * n_y] = t_i
    d_stack[:rows_stage] = t_i @ aug.c
    r0 = n * rows_stage
    t_stack[r0:, (n - 1) * n_y :] = t_n
    c_stack[r0:] = b_n

    ksum = np.kron(np.tril(np.ones((n, n))), np.eye(n_u))
    s_stack = np.tile(np.eye(n_u), (n, 1))
    u_lo_full = np.tile(u_lo, n)
    u_hi_full = np.tile(u_hi, n)

    l_mat = np.vstack([t_stack @ gamma + z_stack, -ksum, ksum])
    d_vec = np.concatenate([c_stack, -u_lo_full, u_hi_full])
    w_mat = np.vstack([-d_stack - t_stack @ phi,
                       np.zeros((2 * n * n_u, n_x))])
    v_mat = np.vstack([np.zeros((rows_y, n_u)), s_stack, -s_stack])
    return l_mat, d_vec, w_mat, v_mat


def constraint_count(n_horizon: int, n_u: int, n_y: int) -> int:
    """Row count of the stacked constraints: 2(N+1) n_y + 4 N n_u."""
    return 2 * (n_horizon + 1) * n_y + 4 * n_horizon * n_u


def make_plan(aug: DtAugModel, n_horizon: int, q, r, p_term, limits: Limits) -> MpcPlan:
    """Build every offline product: prediction, cost (with positive-
    definiteness checks, including P - Q > 0), constraint stack, factored
    Hessian, and the dual Hessian.  Capacity is p/2 (paired bounds can
    never both be active)."""
    q = _as_matrix(q, "q")
    r = _as_matrix(r, "r")
    p_term = _as_matrix(p_term, "p_term")
    for w, name in ((q, "Q"), (r, "R")):
        if np.linalg.eigvalsh((w + w.T) / 2).min() <= 0:
            raise NotPositiveDefinite(f"{name} must be positive definite")
    if np.linalg.eigvalsh(((p_term - q) + (p_term - q).T) / 2).min() <= 0:
        raise NotPositiveDefinite("terminal weight must exceed the stage weight (P - Q > 0)")
    phi, gamma = build_prediction(aug, n_horizon)
    e, omega, psi = build_cost(phi, gamma, q, r, p_term, n_horizon)
    l_mat, d_vec, w_mat, v_mat = build_constraints(aug, phi, gamma, n_horizon, limits)
    ef = factorize_spd(e)
    h = dual_hessian(ef, l_mat)
    p = l_mat.shape[0]
    return MpcPlan(
        n_horizon=int(n_horizon), aug=aug, phi=phi, gamma_mat=gamma,
        omega=omega, psi=psi, e_mat=e, e_factored=ef,
        f_gain=2.0 * gamma.T @ omega,
        constraint_l=l_mat, constraint_d=d_vec, constraint_w=w_mat,
        constraint_v=v_mat, dual_h=h, w_cap=p // 2, limits=limits)


def assemble_qp(plan: MpcPlan, x_k, r_future, u_prev) -> QpProblem:
    """Per-sample QP: only the gradient and the constraint vector depend on
    the state, reference preview, and previous input."""
    x_k = np.asarray(x_k, dtype=float)
    r_future = np.asarray(r_future, dtype=float)
    u_prev = np.asarray(u_prev, dtype=float)
    n = plan.n_horizon
    if x_k.shape != (plan.aug.n_states,):
        raise DimensionMismatch(f"state has shape {x_k.shape}, expected ({plan.aug.n_states},)")
    if r_future.shape != (n * plan.n_outputs,):
        raise DimensionMismatch(
            f"reference preview has shape {r_future.shape}, expected ({n * plan.n_outputs},)")
    if u_prev.shape != (plan.n_inputs,):
        raise DimensionMismatch(f"previous input has shape {u_prev.shape}, "
                                f"expected ({plan.n_inputs},)")
    f = plan.f_gain @ (plan.phi @ x_k - r_future)
    gamma = plan.constraint_d + plan.constraint_w @ x_k + plan.constraint_v @ u_prev
    return QpProblem(plan.e_factored, f, plan.constraint_l, gamma, plan.dual_h,
                     w_cap=plan.w_cap, check_dual=False)


def receding_horizon_step(plan: MpcPlan, x_k, r_future, u_prev,
                          opts: SolverOptions | None = None,
                          workspace: SolverWorkspace | None = None):
    """Solve one sample's QP and apply the first move: u = u_prev + du_0.

    Returns (u, du, solution); a non-optimal status is passed through for
    the caller to handle, never masked.
    """
    prob = assemble_qp(plan, x_k, r_future, u_prev)
    sol = solve(prob, opts, workspace=workspace)
    du = sol.theta[: plan.n_inputs].copy()
    u = np.asarray(u_prev, dtype=float) + du
    return u, du, sol


def build_observer(aug: DtAugModel, l_gain) -> ObserverGain:
    """Validate that A - L C is Schur stable and wrap the gain."""
    l_gain = np.asarray(l_gain, dtype=float)
    if l_gain.shape != (aug.n_states, aug.n_outputs):
        raise DimensionMismatch(
            f"observer gain has shape {l_gain.shape}, "
            f"expected ({aug.n_states}, {aug.n_outputs})")
    radius = np.abs(np.linalg.eigvals(aug.a - l_gain @ aug.c)).max()
    if radius >= 1.0:
        raise ValueError(f"observer error dynamics unstable (spectral radius {radius:.6f})")
    return ObserverGain(l_gain=l_gain)


def observer_step(obs: ObserverGain, aug: DtAugModel, x_hat, du_k, y_k) -> np.ndarray:
    """One output-injection update of the augmented-state estimate."""
    x_hat = np.asarray(x_hat, dtype=float)
    du_k = np.asarray(du_k, dtype=float)
    y_k = np.asarray(y_k, dtype=float)
    if x_hat.shape != (aug.n_states,) or du_k.shape != (aug.n_inputs,) \
            or y_k.shape != (aug.n_outputs,):
        raise DimensionMismatch("observer inputs inconsistent with the model")
    return (aug.a - obs.l_gain @ aug.c) @ x_hat + aug.b @ du_k + obs.l_gain @ y_k


__all__ = [
    "CtModel", "DiscreteModel", "DtAugModel", "Limits", "MpcPlan", "ObserverGain",
    "discretize_zoh", "augment", "build_prediction", "build_cost",
    "build_constraints", "constraint_count", "make_plan", "assemble_qp",
    "receding_horizon_step", "build_observer", "observer_step",
    "QpSolution",
]
