"""Synchronous-round execution of the distributed regularized dual gradient method.

Each round every agent mixes the received dual surrogates (theta) and push-sum
weights (rho) with a column-stochastic matrix, recovers its multiplier
estimate lambda = u / rho, solves its inner problem at that multiplier, and
takes a regularized dual ascent step with the decaying step size beta[t] = q/t.

States are immutable snapshots: advance_round reads one round and returns the
next, so a snapshot can be handed to other threads (metrics, probes) while the
single writer advances.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, InvariantError
from .graph import GraphSequence, build_weight_matrix
from .localsolve import solve_local
from .problem import CoupledProblem

STOP_CONVERGED = "converged"
STOP_T_MAX = "t_max"

# Relative change with a denominator below this is treated as zero.
_RATIO_GUARD = 1e-12


@dataclass(frozen=True)
class RunConfig:
    """Step-size constant, round cap, stopping tolerance, and initial surrogates."""

    q: float
    t_max: int = 5000
    epsilon: float = 0.01
    theta0: np.ndarray | None = None

    def __post_init__(self):
        if self.q <= 0:
            raise ConfigError(f"q must be positive, got {self.q}")
        if self.t_max < 2:
            raise ConfigError(f"t_max must be at least 2, got {self.t_max}")
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")

    def validate_for(self, problem: CoupledProblem) -> None:
        """Enforce the step-size rule q * gamma_total / m >= 4."""
        gamma = problem.gamma_total
        m = problem.m
        if self.q * gamma / m < 4.0:
            raise ConfigError(
                f"q = {self.q:g} too small: q*gamma/m = {self.q * gamma / m:g} < 4; "
                f"minimum q = {4.0 * m / gamma:g}"
            )

    def beta(self, t: int) -> float:
        """Step size q / t for round t >= 1."""
        return self.q / t


@dataclass(frozen=True)
class RunState:
    """All per-agent iterates after round t, plus running ergodic sums.

    theta, u, lam are (m, p) arrays; rho is (m,); x and ergodic_sum are
    per-agent vectors of each agent's own dimension. ergodic_sum_i holds
    sum_{s<=t} (s-1) x_i[s], the numerator of the weighted running average.
    """

    t: int
    theta: np.ndarray
    rho: np.ndarray
    u: np.ndarray
    lam: np.ndarray
    x: tuple[np.ndarray, ...]
    ergodic_sum: tuple[np.ndarray, ...]
    config: RunConfig


def init_state(problem: CoupledProblem, config: RunConfig) -> RunState:
    """Round-0 state: rho = 1, everything else zero unless theta0 is given."""
    config.validate_for(problem)
    m, p = problem.m, problem.p
    if config.theta0 is None:
        theta = np.zeros((m, p))
    else:
        theta = np.array(config.theta0, dtype=float)
        if theta.shape != (m, p):
            raise ConfigError(f"theta0 has shape {theta.shape}, expected ({m}, {p})")
    return RunState(
        t=0,
        theta=theta,
        rho=np.ones(m),
        u=np.zeros((m, p)),
        lam=np.zeros((m, p)),
        x=tuple(np.zeros(a.dim) for a in problem.agents),
        ergodic_sum=tuple(np.zeros(a.dim) for a in problem.agents),
        config=config,
    )


def advance_round(state: RunState, problem: CoupledProblem, seq: GraphSequence) -> RunState:
    """One synchronous round: mix, normalize, solve locally, ascend the dual."""
    W = build_weight_matrix(seq.edges(state.t), problem.m)
    t_next = state.t + 1
    beta = state.config.beta(t_next)

    u = W @ state.theta
    rho = W @ state.rho
    if np.any(rho <= 0):
        raise InvariantError(f"push-sum weight became non-positive at round {t_next}")
    lam = u / rho[:, None]

    xs = []
    theta = np.empty_like(u)
    ergodic = []
    for i, agent in enumerate(problem.agents):
        x_i = solve_local(agent, lam[i])
        theta[i] = u[i] + beta * (agent.A @ x_i - agent.b - agent.gamma * lam[i])
        xs.append(x_i)
        ergodic.append(state.ergodic_sum[i] + (t_next - 1) * x_i)

    return replace(
        state,
        t=t_next,
        theta=theta,
        rho=rho,
        u=u,
        lam=lam,
        x=tuple(xs),
        ergodic_sum=tuple(ergodic),
    )


def ergodic_average(state: RunState) -> list[np.ndarray]:
    """Weighted running average of the primal iterates, defined for t >= 2.

    Returns, per agent, sum_{s<=t} (s-1) x_i[s] divided by t(t-1)/2. Each
    average lies in the agent's box (convex combination of feasible points).
    """
    if state.t < 2:
        raise ValueError(f"ergodic average undefined before round 2 (t = {state.t})")
    denom = state.t * (state.t - 1) / 2.0
    return [s / denom for s in state.ergodic_sum]


def stopping_residuals(
    prev: RunState, state: RunState, problem: CoupledProblem
) -> tuple[float, float, float]:
    """The three stop measures: dual movement, coupling violation, relative objective change."""
    dual_move = float(np.max(np.abs(state.lam - prev.lam)))
    violation = float(np.linalg.norm(problem.coupling_residual(state.x)))
    rel_change = 0.0
    for agent, x_new, x_old in zip(problem.agents, state.x, prev.x):
        f_new = agent.objective.value(x_new)
        f_old = agent.objective.value(x_old)
        if abs(f_old) < _RATIO_GUARD:
            continue
        rel_change = max(rel_change, abs((f_new - f_old) / f_old))
    return dual_move, violation, rel_change


def run_until(
    problem: CoupledProblem,
    seq: GraphSequence,
    config: RunConfig,
    f_star: float | None = None,
):
    """Run rounds until the three stop criteria all fall below epsilon, or t_max.

    Returns (final state, metrics rows, stop reason). The gap column of the
    metrics is filled only when the centralized optimum f_star is supplied.
    """
    from .metrics import evaluate_round

    state = init_state(problem, config)
    rows = []
    reason = STOP_T_MAX
    while state.t < config.t_max:
        prev = state
        state = advance_round(state, problem, seq)
        rows.append(evaluate_round(state, problem, f_star=f_star))
        residuals = stopping_residuals(prev, state, problem)
        if all(r <= config.epsilon for r in residuals):
            reason = STOP_CONVERGED
            break
    return state, rows, reason
