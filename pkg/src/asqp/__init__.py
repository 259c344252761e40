"""Dense active-set QP solving with rank-one inverse updates, an integral-
action MPC condensing layer, and a chain-of-masses closed-loop benchmark.

The hot update loop has a compiled twin (``asqp._native``); when the
extension is absent or ``ASQP_BACKEND=python`` is set, a NumPy fallback
with identical semantics runs instead.
"""

from . import _backend
from .errors import (AsqpError, CapacityExceeded, DimensionMismatch,
                     NotPositiveDefinite, ParseError, PivotBreakdown, SizeLimit,
                     SolverFailure, WindowOutOfRange)
from .linalg import FactoredSpd, dual_hessian, factorize_spd, solve_factored
from .solver import (EventCounts, QpProblem, QpSolution, SolveStatus, SolverOptions,
                     SolverWorkspace, SolveTrace, aimu, dependence_check,
                     footprint_sizes, initial_violation, memory_footprint,
                     objective_value, predicted_flops, simu, solve,
                     unconstrained_solution)

__version__ = "0.1.0"


def native_backend_available() -> bool:
    """True when the compiled update-loop kernel is importable and enabled."""
    return _backend.native_available()


__all__ = [
    "AsqpError", "CapacityExceeded", "DimensionMismatch", "NotPositiveDefinite",
    "ParseError", "PivotBreakdown", "SizeLimit", "SolverFailure", "WindowOutOfRange",
    "FactoredSpd", "dual_hessian", "factorize_spd", "solve_factored",
    "EventCounts", "QpProblem", "QpSolution", "SolveStatus", "SolverOptions",
    "SolverWorkspace", "SolveTrace", "aimu", "dependence_check", "footprint_sizes",
    "initial_violation", "memory_footprint", "objective_value", "predicted_flops",
    "simu", "solve", "unconstrained_solution", "native_backend_available",
    "__version__",
]
