"""Centralized high-accuracy solver used as the gap oracle.

Runs plain gradient ascent on the unregularized dual, which is differentiable
with a Lipschitz gradient because every agent objective is strongly convex.
The regularized algorithm's fixed point is perturbed away from this solution
by its regularization, so gap metrics measured against this oracle carry that
offset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleProblemError
from .localsolve import solve_local
from .problem import CoupledProblem

_DIVERGENCE_NORM = 1e9


@dataclass(frozen=True)
class ReferenceSolution:
    """Primal solution, its objective value, and the multiplier that produced it."""

    x: tuple[np.ndarray, ...]
    objective: float
    multiplier: np.ndarray
    violation: float


def solve_centralized(
    problem: CoupledProblem, tol: float, max_iter: int = 200_000
) -> ReferenceSolution:
    """Ascend the unregularized dual with fixed step 1/L until the coupling
    residual norm falls below tol.

    L = sum_i ||A_i||^2 / tau_i bounds the dual gradient's Lipschitz constant.
    Raises when the iteration cap is hit or the multiplier norm blows past
    1e9, both of which indicate an unsatisfiable or ill-posed coupling.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    lipschitz = sum(
        np.linalg.norm(a.A, 2) ** 2 / a.tau for a in problem.agents
    )
    if lipschitz == 0.0:
        # All A_i zero: the coupling is constant in x, feasible iff sum b_i = 0.
        xs = tuple(solve_local(a, np.zeros(problem.p)) for a in problem.agents)
        residual = problem.coupling_residual(xs)
        if np.linalg.norm(residual) > tol:
            raise InfeasibleProblemError("coupling constraint unsatisfiable: all A_i are zero")
        return ReferenceSolution(
            x=xs,
            objective=problem.objective_value(xs),
            multiplier=np.zeros(problem.p),
            violation=float(np.linalg.norm(residual)),
        )
    step = 1.0 / lipschitz
    lam = np.zeros(problem.p)
    for _ in range(max_iter):
        xs = tuple(solve_local(a, lam) for a in problem.agents)
        residual = problem.coupling_residual(xs)
        gap_norm = float(np.linalg.norm(residual))
        if gap_norm <= tol:
            return ReferenceSolution(
                x=xs,
                objective=problem.objective_value(xs),
                multiplier=lam,
                violation=gap_norm,
            )
        lam = lam + step * residual
        if np.linalg.norm(lam) > _DIVERGENCE_NORM:
            break
    raise InfeasibleProblemError(
        "dual ascent did not close the coupling residual: "
        "the problem is infeasible or ill-posed at this tolerance"
    )
