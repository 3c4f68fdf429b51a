"""Per-round observables, convergence-bound evaluators, and rate fitting.

The bound evaluators plug an empirical dual-norm cap D (the running max of
max_i ||lambda_i[t]|| over a run) into the printed rate expressions. With the
admissible network constants delta = m^(-m*window) and
eta = (1 - m^(-m*window))^(1/(m*window)) the bounds are extremely loose for
m >= 3; they are reported for completeness while rate_fit carries the
empirical rate check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import RunState, ergodic_average
from .problem import CoupledProblem, compute_G_bound


@dataclass(frozen=True)
class MetricsRow:
    """One round's observables; objective/gap/violation use the ergodic average."""

    t: int
    objective: float
    gap: float
    violation: float
    violation_inst: float
    disagreement: float
    max_lambda: float
    beta: float


def evaluate_round(
    state: RunState, problem: CoupledProblem, f_star: float | None = None
) -> MetricsRow:
    """Observables after a completed round. At t = 1 the ergodic average is
    not yet defined and the instantaneous iterate stands in for it."""
    xs_avg = ergodic_average(state) if state.t >= 2 else list(state.x)
    objective = problem.objective_value(xs_avg)
    gap = objective - f_star if f_star is not None else math.nan
    violation = float(np.linalg.norm(problem.coupling_residual(xs_avg)))
    violation_inst = float(np.linalg.norm(problem.coupling_residual(state.x)))
    diffs = state.lam[:, None, :] - state.lam[None, :, :]
    disagreement = float(np.sqrt((diffs * diffs).sum(axis=2)).max())
    max_lambda = float(np.sqrt((state.lam * state.lam).sum(axis=1)).max())
    return MetricsRow(
        t=state.t,
        objective=objective,
        gap=gap,
        violation=violation,
        violation_inst=violation_inst,
        disagreement=disagreement,
        max_lambda=max_lambda,
        beta=state.config.beta(state.t),
    )


@dataclass(frozen=True)
class BoundConstants:
    """Everything the printed rate bounds need.

    G[i] bounds ||A_i x - b_i|| over the box; D caps the dual norms; delta and
    eta are the push-sum imbalance and diffusion constants of an m-agent
    sequence with the given connectivity window; B_grad bounds the 1-norm of
    any dual gradient step via sqrt(p) max_i (G_i + gamma_i D).
    """

    m: int
    p: int
    window: int
    q: float
    D: float
    G: np.ndarray
    gammas: np.ndarray
    theta0_l1: float

    def __post_init__(self):
        object.__setattr__(self, "G", np.asarray(self.G, dtype=float))
        object.__setattr__(self, "gammas", np.asarray(self.gammas, dtype=float))

    @property
    def gamma_total(self) -> float:
        return float(self.gammas.sum())

    @property
    def delta(self) -> float:
        return float(self.m) ** (-self.m * self.window)

    @property
    def eta(self) -> float:
        return (1.0 - self.delta) ** (1.0 / (self.m * self.window))

    @property
    def B_grad(self) -> float:
        return float(np.sqrt(self.p) * np.max(self.G + self.gammas * self.D))


def constants_from_run(
    problem: CoupledProblem,
    window: int,
    q: float,
    rows,
    theta0: np.ndarray | None = None,
) -> BoundConstants:
    """Bound constants for a finished run, with D the run's max dual norm."""
    D = max((row.max_lambda for row in rows), default=0.0)
    theta0_l1 = 0.0 if theta0 is None else float(np.abs(theta0).sum(axis=1).sum())
    return BoundConstants(
        m=problem.m,
        p=problem.p,
        window=window,
        q=q,
        D=D,
        G=np.array([compute_G_bound(a) for a in problem.agents]),
        gammas=np.array([a.gamma for a in problem.agents]),
        theta0_l1=theta0_l1,
    )


def theorem2_bound(T: int, c: BoundConstants) -> float:
    """Printed upper bound on the ergodic objective gap after T rounds."""
    if T < 1:
        raise ValueError("bound defined for T >= 1")
    s1 = float(np.sum(c.G + c.gammas * c.D))
    s2 = float(np.sum((c.G + c.gammas * c.D) ** 2))
    eta = c.eta
    bracket = (eta / (1.0 - eta)) * c.theta0_l1 + (
        c.q * c.m * c.B_grad / (1.0 - eta)
    ) * (1.0 + math.log(T))
    return (32.0 / (T * c.delta)) * s1 * bracket + (c.q / T) * s2


def theorem3_bound(T: int, c: BoundConstants) -> float:
    """Printed upper bound on the squared coupling violation of the ergodic average."""
    if T < 1:
        raise ValueError("bound defined for T >= 1")
    s1 = float(np.sum(c.G + c.gammas * c.D))
    s2 = float(np.sum((c.G + c.gammas * c.D) ** 2))
    eta = c.eta
    bracket = (8.0 * eta / (1.0 - eta)) * c.theta0_l1 + (
        8.0 * c.q * c.m * c.B_grad / (1.0 - eta)
    ) * (1.0 + math.log(T))
    return (c.gamma_total / (T * c.delta)) * s1 * bracket + (
        c.q * c.gamma_total / (4.0 * T)
    ) * s2


def lemma2_residual(
    state_t: RunState,
    state_t1: RunState,
    problem: CoupledProblem,
    lambda_probe: np.ndarray,
    c: BoundConstants,
) -> float:
    """Slack of the per-round descent inequality on the mean dual surrogate.

    Evaluates RHS - LHS of the inequality bounding ||mean(theta)[t+1] - lambda||^2
    at the probe multiplier, with the comparison primal point taken as the
    round's own x[t+1]. Non-negative (up to roundoff) whenever D dominates
    every dual norm in the run.
    """
    if state_t1.t != state_t.t + 1:
        raise ValueError("states must be consecutive rounds")
    lam_probe = np.asarray(lambda_probe, dtype=float)
    beta = state_t1.config.beta(state_t1.t)
    m = problem.m
    theta_bar_t = state_t.theta.mean(axis=0)
    theta_bar_t1 = state_t1.theta.mean(axis=0)

    def lagrangian(xs, mult):
        total = 0.0
        quad = float(mult @ mult)
        for agent, x in zip(problem.agents, xs):
            total += agent.objective.value(x)
            total += float(mult @ (agent.A @ x - agent.b))
            total -= 0.5 * agent.gamma * quad
        return total

    lhs = float(np.sum((theta_bar_t1 - lam_probe) ** 2))
    rhs = float(np.sum((theta_bar_t - lam_probe) ** 2))
    coeffs = c.G + c.gammas * c.D
    for i, agent in enumerate(problem.agents):
        rhs += (4.0 * beta / m) * coeffs[i] * float(
            np.linalg.norm(state_t1.lam[i] - theta_bar_t)
        )
        rhs -= (beta / m) * agent.gamma * float(
            np.sum((state_t1.lam[i] - lam_probe) ** 2)
        )
        rhs += (beta**2 / m) * coeffs[i] ** 2
    rhs -= (2.0 * beta / m) * (
        lagrangian(state_t1.x, lam_probe) - lagrangian(state_t1.x, theta_bar_t)
    )
    return rhs - lhs


def rate_fit(rows, which: str) -> tuple[float, float]:
    """Fit value(T) against ln T / T over the rows with T >= 10.

    Returns (c_hat, max_ratio): c_hat is the median of g(T) = value(T)*T/ln T
    over the last half of the retained rows, and max_ratio = max g / g(T0)
    with T0 the first retained round. A bounded max_ratio means the observed
    decay is no slower than ln T / T beyond T0.
    """
    if which == "gap":
        pick = lambda r: r.gap
    elif which == "violation2":
        pick = lambda r: r.violation**2
    else:
        raise ValueError(f"which must be 'gap' or 'violation2', got {which!r}")
    retained = [(r.t, pick(r)) for r in rows if r.t >= 10]
    if len(retained) < 10:
        raise ValueError(f"need at least 10 rows with T >= 10, got {len(retained)}")
    g = np.array([v * t / math.log(t) for t, v in retained])
    c_hat = float(np.median(g[len(g) // 2 :]))
    max_ratio = float(g.max() / g[0])
    return c_hat, max_ratio
