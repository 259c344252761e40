"""Dense numerical kernels: packed no-pivot factorization and substitutions.

This is the only module that factorizes a matrix.  A symmetric positive
definite matrix is eliminated once, without pivoting, into a unit-lower
factor and an upper factor stored summed in a single square buffer (the
strictly lower triangle holds the multipliers, the upper triangle including
the diagonal holds the eliminated matrix).  Solves then run as one forward
and one backward substitution, 2n^2 flops total.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DimensionMismatch, PivotBreakdown

PIVOT_FLOOR = 1e-12
SYMMETRY_RTOL = 1e-10


class FactoredSpd:
    """Packed factorization of a symmetric positive definite matrix.

    Attributes
    ----------
    n : matrix dimension.
    packed_lu : (n, n) array; strictly lower triangle = elimination
        multipliers (unit diagonal implied), upper triangle = upper factor.
    """

    def __init__(self, n: int, packed_lu: np.ndarray):
        self.n = int(n)
        self.packed_lu = packed_lu

    def solve(self, rhs: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        return solve_factored(self, rhs, out)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """Apply the original matrix: (L)(U x) without reconstructing it."""
        return self.dense @ np.asarray(x, dtype=float)

    @cached_property
    def dense(self) -> np.ndarray:
        """Reconstructed original matrix (L + I-diagonal) @ U; cached."""
        lower = np.tril(self.packed_lu, -1)
        np.fill_diagonal(lower, 1.0)
        return lower @ np.triu(self.packed_lu)


def factorize_spd(e: np.ndarray) -> FactoredSpd:
    """Factor a symmetric positive definite matrix by Gaussian elimination
    without pivoting, returning the packed lower/upper factors.

    The upper triangle of ``e`` is treated as authoritative after a one-time
    symmetry check at relative tolerance 1e-10.

    Raises
    ------
    DimensionMismatch : ``e`` is not square.
    ValueError : ``e`` is not symmetric within tolerance.
    PivotBreakdown : a pivot is <= 1e-12 (not positive definite).
    """
    e = np.asarray(e, dtype=float)
    if e.ndim != 2 or e.shape[0] != e.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {e.shape}")
    n = e.shape[0]
    scale = np.abs(e).max() if n else 0.0
    if scale and np.abs(e - e.T).max() > SYMMETRY_RTOL * scale:
        raise ValueError("matrix is not symmetric within 1e-10 relative tolerance")

    a = np.triu(e)
    a += np.triu(e, 1).T
    for k in range(n):
        pivot = a[k, k]
        if pivot <= PIVOT_FLOOR:
            raise PivotBreakdown(f"pivot {pivot:.3e} at step {k} is below {PIVOT_FLOOR:.0e}")
        a[k + 1 :, k] /= pivot
        a[k + 1 :, k + 1 :] -= np.outer(a[k + 1 :, k], a[k, k + 1 :])
    return FactoredSpd(n, a)


def solve_factored(f: FactoredSpd, rhs: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """Solve E x = rhs using the packed factors (forward then backward
    substitution on the single packed buffer)."""
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (f.n,):
        raise DimensionMismatch(f"rhs has shape {rhs.shape}, expected ({f.n},)")
    y = solve_triangular(f.packed_lu, rhs, lower=True, unit_diagonal=True, check_finite=False)
    x = solve_triangular(f.packed_lu, y, lower=False, check_finite=False)
    if out is not None:
        out[:] = x
        return out
    return x


def solve_factored_matrix(f: FactoredSpd, rhs: np.ndarray) -> np.ndarray:
    """Solve E X = rhs for a matrix right-hand side of shape (n, k)."""
    rhs = np.asarray(rhs, dtype=float)
    if rhs.ndim != 2 or rhs.shape[0] != f.n:
        raise DimensionMismatch(f"rhs has shape {rhs.shape}, expected ({f.n}, k)")
    y = solve_triangular(f.packed_lu, rhs, lower=True, unit_diagonal=True, check_finite=False)
    return solve_triangular(f.packed_lu, y, lower=False, check_finite=False)


def dual_hessian(f: FactoredSpd, m: np.ndarray) -> np.ndarray:
    """Assemble H = M E^{-1} M^T column by column.

    Each column of eta = E^{-1} M^T is obtained by substitution on one row
    of the constraint matrix; H = M @ eta.  H is computed once, offline.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[1] != f.n:
        raise DimensionMismatch(f"constraint matrix has shape {m.shape}, expected (p, {f.n})")
    if m.shape[0] == 0:
        return np.zeros((0, 0))
    eta = solve_factored_matrix(f, m.T)
    return m @ eta
