"""Independent reference solvers used to cross-check the main solver.

All three deliberately avoid the package's own factorization/update path:
they reconstruct the dense Hessian and lean on numpy.linalg, so agreement
with :func:`asqp.solver.solve` is a two-sided check.

* :func:`hildreth_solve` - dual coordinate ascent, scalar-wise multiplier
  sweeps with projection onto the non-negative orthant.
* :func:`enumerate_active_sets` - exhaustive candidate search over all
  full-row-rank active subsets; exact on small instances and doubles as a
  feasibility decision procedure.
* :func:`primal_active_set_solve` - textbook primal active-set method from
  a feasible start with a final KKT certificate; covers instances too large
  for enumeration (MPC-scale cross checks).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import OracleInconsistency, SizeLimit
from .solver import EventCounts, QpProblem, QpSolution, SolveStatus

ENUM_MAX_CONSTRAINTS = 16
ENUM_MAX_VARIABLES = 6
FEAS_TOL = 1e-10


@dataclass
class HildrethOptions:
    """Convergence tolerance (max-norm change per sweep) and sweep cap."""

    tol: float = 1e-7
    max_iter: int = 38


def _dense_pieces(prob: QpProblem):
    e = prob.dense_hessian()
    return e, prob.grad, prob.constraints, prob.bounds


def _solution(theta, lam_full, status, m_star, zero_tol=0.0) -> QpSolution:
    active = np.flatnonzero(lam_full > zero_tol)
    return QpSolution(
        theta=np.asarray(theta, dtype=float),
        lambda_active=lam_full[active].copy(),
        active=active.astype(np.int64),
        c_star=int(active.size),
        m_star=int(m_star),
        status=status,
        events=EventCounts(0, 0, 0),
    )


def hildreth_solve(prob: QpProblem, opts: HildrethOptions | None = None) -> QpSolution:
    """Dual coordinate ascent: sweep the multipliers one at a time with the
    freshest values, projecting each onto lambda_i >= 0, until the sweep-to-
    sweep change drops below ``tol`` (max-norm) or the sweep cap is hit.

    The primal solution then corrects the unconstrained one through the
    dense Hessian.  Feasible problems only; no infeasibility detection.
    """
    if opts is None:
        opts = HildrethOptions()
    e, f, m, gamma = _dense_pieces(prob)
    theta0 = np.linalg.solve(e, -f)
    p = prob.p
    if p == 0:
        return _solution(theta0, np.zeros(0), SolveStatus.OPTIMAL, 1)
    einv_mt = np.linalg.solve(e, m.T)
    h = m @ einv_mt
    k0 = gamma - m @ theta0
    lam = np.zeros(p)
    status = SolveStatus.ITERATION_LIMIT
    sweeps = 0
    for sweeps in range(1, opts.max_iter + 1):
        prev = lam.copy()
        for i in range(p):
            hii = h[i, i]
            if hii <= 0.0:
                continue
            w = -(k0[i] + h[i] @ lam - hii * lam[i]) / hii
            lam[i] = w if w > 0.0 else 0.0
        if np.abs(lam - prev).max() < opts.tol:
            status = SolveStatus.OPTIMAL
            break
    theta = theta0 - einv_mt @ lam
    return _solution(theta, lam, status, sweeps)


def enumerate_active_sets(prob: QpProblem) -> QpSolution:
    """Exhaustive oracle: solve the equality-constrained KKT system for
    every full-row-rank subset of constraints of size <= n, keep candidates
    with non-negative multipliers that satisfy all constraints, and return
    the lowest-objective one.

    If no candidate at all is primal feasible the problem is infeasible
    (every feasible problem's minimizer appears among the candidates).
    Rank-deficient subsets are skipped via a Cholesky test on the active
    dual-Hessian block.
    """
    if prob.p > ENUM_MAX_CONSTRAINTS or prob.n > ENUM_MAX_VARIABLES:
        raise SizeLimit(
            f"enumeration oracle limited to p <= {ENUM_MAX_CONSTRAINTS}, "
            f"n <= {ENUM_MAX_VARIABLES}; got p={prob.p}, n={prob.n}")
    e, f, m, gamma = _dense_pieces(prob)
    theta0 = np.linalg.solve(e, -f)
    p, n = prob.p, prob.n
    if p == 0:
        return _solution(theta0, np.zeros(0), SolveStatus.OPTIMAL, 1)
    einv_mt = np.linalg.solve(e, m.T)
    h = m @ einv_mt
    k0 = gamma - m @ theta0

    def objective(theta):
        return 0.5 * theta @ e @ theta + theta @ f

    examined = 0
    feasible_seen = False
    best = None
    if (m @ theta0 - gamma).max() <= FEAS_TOL:
        feasible_seen = True
        best = (objective(theta0), theta0, np.zeros(0), ())
    for size in range(1, min(n, p) + 1):
        for subset in combinations(range(p), size):
            idx = np.asarray(subset)
            examined += 1
            h_block = h[np.ix_(idx, idx)]
            try:
                np.linalg.cholesky(h_block)
            except np.linalg.LinAlgError:
                continue
            lam = np.linalg.solve(h_block, -k0[idx])
            theta = theta0 - einv_mt[:, idx] @ lam
            if (m @ theta - gamma).max() > FEAS_TOL:
                continue
            feasible_seen = True
            if lam.min() < -FEAS_TOL:
                continue
            cand = (objective(theta), theta, lam, subset)
            if best is None or cand[0] < best[0]:
                best = cand
    if best is None:
        if feasible_seen:
            raise OracleInconsistency("feasible point seen but no KKT candidate found")
        return QpSolution(
            theta=theta0, lambda_active=np.zeros(0), active=np.zeros(0, dtype=np.int64),
            c_star=0, m_star=examined, status=SolveStatus.INFEASIBLE,
            events=EventCounts(0, 0, 0))
    _, theta, lam, subset = best
    return QpSolution(
        theta=theta, lambda_active=np.asarray(lam, dtype=float),
        active=np.asarray(subset, dtype=np.int64), c_star=len(subset),
        m_star=examined, status=SolveStatus.OPTIMAL, events=EventCounts(0, 0, 0))


def kkt_residuals(prob: QpProblem, theta, lam_full):
    """(stationarity_inf, primal_inf, dual_inf, comp_slack) raw residuals."""
    e, f, m, gamma = _dense_pieces(prob)
    slack = m @ theta - gamma
    stat = float(np.abs(e @ theta + f + m.T @ lam_full).max()) if prob.p else \
        float(np.abs(e @ theta + f).max())
    primal = float(max(slack.max(initial=0.0), 0.0))
    dual = float(max(-lam_full.min(initial=0.0), 0.0))
    comp = float(abs(lam_full @ slack)) if prob.p else 0.0
    return stat, primal, dual, comp


def primal_active_set_solve(prob: QpProblem, theta_start=None,
                            max_iter: int | None = None) -> QpSolution:
    """Primal active-set method from a feasible point, with certification.

    Repeatedly solves the equality-constrained step on the working set via
    a bordered KKT system (numpy.linalg), takes the largest feasible step
    toward it, adds the blocking constraint, and drops working constraints
    with negative multipliers at stationarity.  The result is verified
    against the KKT conditions; an uncertifiable answer raises
    OracleInconsistency instead of returning silently.
    """
    e, f, m, gamma = _dense_pieces(prob)
    n, p = prob.n, prob.p
    theta = np.linalg.solve(e, -f) if theta_start is None else \
        np.asarray(theta_start, dtype=float).copy()
    scale = 1.0 + (float(np.abs(gamma).max()) if p else 0.0)
    if p and (m @ theta - gamma).max() > 1e-9 * scale:
        raise ValueError("primal oracle needs a feasible starting point")
    if max_iter is None:
        max_iter = 50 * (p + 1)
    working: list[int] = []
    lam_full = np.zeros(p)
    iters = 0
    for iters in range(1, max_iter + 1):
        c = len(working)
        grad_now = e @ theta + f
        if c:
            rows = m[working]
            kkt = np.block([[e, rows.T], [rows, np.zeros((c, c))]])
            rhs = np.concatenate([-grad_now, np.zeros(c)])
            try:
                sol = np.linalg.solve(kkt, rhs)
            except np.linalg.LinAlgError:
                sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
            d, mu = sol[:n], sol[n:]
        else:
            d, mu = np.linalg.solve(e, -grad_now), np.zeros(0)
        if np.abs(d).max(initial=0.0) <= 1e-11 * (1.0 + np.abs(theta).max(initial=0.0)):
            if c == 0 or mu.min() >= -1e-12:
                lam_full[:] = 0.0
                lam_full[working] = np.maximum(mu, 0.0)
                break
            working.pop(int(np.argmin(mu)))
            continue
        alpha = 1.0
        blocker = -1
        if p:
            in_working = np.zeros(p, dtype=bool)
            in_working[working] = True
            advance = m @ d
            room = gamma - m @ theta
            for i in range(p):
                if in_working[i] or advance[i] <= 1e-13:
                    continue
                step = max(room[i], 0.0) / advance[i]
                if step < alpha:
                    alpha = step
                    blocker = i
        theta += alpha * d
        if blocker >= 0:
            working.append(blocker)
    else:
        raise OracleInconsistency("primal oracle exceeded its iteration budget")
    stat, primal, dual, comp = kkt_residuals(prob, theta, lam_full)
    fscale = 1.0 + float(np.abs(f).max(initial=0.0))
    if stat > 1e-8 * fscale or primal > 1e-8 * scale or comp > 1e-8 * scale * fscale:
        raise OracleInconsistency(
            f"primal oracle failed certification (stat={stat:.2e}, "
            f"primal={primal:.2e}, comp={comp:.2e})")
    return _solution(theta, lam_full, SolveStatus.OPTIMAL, iters)
