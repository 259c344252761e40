"""Shared test utilities: random problem generators with known properties."""

import numpy as np
import pytest

from asqp import native_backend_available
from asqp.solver import QpProblem

BACKENDS = ["python",
            pytest.param("native", marks=pytest.mark.skipif(
                not native_backend_available(),
                reason="compiled backend not available"))]


def random_spd(rng, n, jitter=0.5):
    a = rng.standard_normal((n, n))
    return a @ a.T + (jitter + n * 0.1) * np.eye(n)


def random_feasible_qp(rng, n=None, p=None, w_cap=None):
    """QP with a guaranteed strictly interior point (bounds are built from
    a random point plus positive slack)."""
    if n is None:
        n = int(rng.integers(1, 7))
    if p is None:
        p = int(rng.integers(2, 17))
    e = random_spd(rng, n)
    f = 2.0 * rng.standard_normal(n)
    m = rng.standard_normal((p, n))
    norms = np.linalg.norm(m, axis=1)
    m[norms < 0.1] += 0.5  # keep rows away from zero
    interior = rng.standard_normal(n)
    gamma = m @ interior + rng.uniform(0.05, 2.0, size=p)
    return QpProblem.build(e, f, m, gamma, w_cap=w_cap)


def random_infeasible_qp(rng):
    """Two-variable infeasible triple: two half-planes meeting at a point
    and a third constraint that is a non-positive combination of their rows
    shifted strictly past the meeting point, randomly rotated."""
    a1 = rng.uniform(0.2, 2.0)
    a2 = rng.uniform(0.2, 2.0)
    eps = rng.uniform(0.1, 2.0)
    meet = rng.standard_normal(2)
    y1 = -rng.uniform(0.1, 2.0)
    y2 = -rng.uniform(0.1, 2.0)
    m12 = np.array([[-a1, 1.0], [a2, 1.0]])
    g12 = m12 @ meet
    m3 = y1 * m12[0] + y2 * m12[1]
    g3 = m3 @ (meet + np.array([0.0, eps]))
    m = np.vstack([m12, m3])
    gamma = np.concatenate([g12, [g3]])
    angle = rng.uniform(0.0, 2.0 * np.pi)
    rot = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    m = m @ rot
    e = random_spd(rng, 2)
    f = rng.standard_normal(2)
    return QpProblem.build(e, f, m, gamma)


def scatter(sol, p):
    return sol.scatter_multipliers(p)


def explicit_active_inverse(prob, active):
    """Brute-force inverse of the active dual-Hessian block via numpy."""
    e = prob.dense_hessian()
    m_a = prob.constraints[np.asarray(active, dtype=int)]
    h_a = m_a @ np.linalg.solve(e, m_a.T)
    return np.linalg.inv(h_a)
