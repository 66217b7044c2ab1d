"""Exterior-penalty constrained optimization and three design problems.

Constraints are ``g_i(x) <= 0``. The optimizer minimizes
``f(x) + rho * sum(max(0, g_i(x)) ** beta)``; because a quadratic penalty puts
its minimizer slightly outside the feasible set, :func:`solve` reports the best
*feasible* point evaluated during the run, not the penalized incumbent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .core import BestRecord, EpoConfig, RunResult, SearchSpace, run

__all__ = [
    "FEASIBILITY_TOL",
    "GEAR_RATIO",
    "ConstrainedProblem",
    "ConstrainedResult",
    "PenalizedObjective",
    "PROBLEMS",
    "cantilever_problem",
    "gear_train_exhaustive_oracle",
    "gear_train_problem",
    "get_problem",
    "penalized_value",
    "solve",
    "three_bar_truss_problem",
]

FEASIBILITY_TOL = 1e-9
GEAR_RATIO = 1.0 / 6.931


@dataclass(frozen=True)
class ConstrainedProblem:
    name: str
    objective: Callable[[np.ndarray], float]
    constraints: Sequence[Callable[[np.ndarray], float]]
    space: SearchSpace
    penalty_rho: float = 1e6
    penalty_beta: float = 2.0
    integer_vars: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.penalty_rho > 0:
            raise ValueError("penalty_rho must be positive")
        if not self.penalty_beta >= 1:
            raise ValueError("penalty_beta must be >= 1")
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "integer_vars", frozenset(self.integer_vars))

    def prepare(self, x):
        """Round integer coordinates to the nearest lattice point inside the box."""
        x = np.array(x, dtype=np.float64)
        if self.integer_vars:
            idx = sorted(self.integer_vars)
            lo = np.ceil(self.space.lower[idx])
            hi = np.floor(self.space.upper[idx])
            x[idx] = np.clip(np.rint(x[idx]), lo, hi)
        return x

    def constraint_values(self, x):
        with np.errstate(divide="ignore", invalid="ignore"):
            g = np.array([float(c(x)) for c in self.constraints], dtype=np.float64)
        g[np.isnan(g)] = np.inf
        return g

    def max_violation(self, x):
        g = self.constraint_values(x)
        return float(max(0.0, g.max())) if g.size else 0.0

    def is_feasible(self, x, tol=FEASIBILITY_TOL):
        return self.max_violation(x) <= tol

    def with_penalty(self, rho=None, beta=None):
        return ConstrainedProblem(
            self.name, self.objective, self.constraints, self.space,
            self.penalty_rho if rho is None else rho,
            self.penalty_beta if beta is None else beta,
            self.integer_vars,
        )


def penalized_value(problem, x):
    """``f(x) + rho * sum(max(0, g_i(x)) ** beta)`` after integer rounding; non-finite -> inf."""
    x = problem.prepare(x)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        f = float(problem.objective(x))
        g = problem.constraint_values(x)
        violation = np.maximum(g, 0.0)
        value = f + problem.penalty_rho * float(np.sum(violation ** problem.penalty_beta))
    return value if math.isfinite(value) else math.inf


class PenalizedObjective:
    """Penalized objective that also remembers the best feasible point it evaluated."""

    def __init__(self, problem):
        self.problem = problem
        self.feasible_x = None
        self.feasible_f = math.inf

    def __call__(self, x):
        problem = self.problem
        x = problem.prepare(x)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            f = float(problem.objective(x))
            g = problem.constraint_values(x)
            violation = np.maximum(g, 0.0)
            value = f + problem.penalty_rho * float(np.sum(violation ** problem.penalty_beta))
        if not math.isfinite(value):
            return math.inf
        if (g.size == 0 or g.max() <= FEASIBILITY_TOL) and f < self.feasible_f:
            self.feasible_f = f
            self.feasible_x = x
        return value


@dataclass(eq=False)
class ConstrainedResult:
    run: RunResult
    x: np.ndarray
    value: float
    feasible: bool
    max_violation: float

    def as_run_result(self):
        """The run with its incumbent replaced by the reported solution."""
        r = self.run
        return RunResult(BestRecord(self.x, self.value), r.trace, r.evaluations, r.elapsed, r.seed)


def solve(problem, config=None):
    """Optimize ``problem`` with the penalty method.

    Reports the best feasible evaluated point; if none was feasible, the
    penalized incumbent (rounded) with its raw objective value.
    """
    config = EpoConfig() if config is None else config
    penalized = PenalizedObjective(problem)
    result = run(config, problem.space, penalized)
    if penalized.feasible_x is not None:
        x, f = penalized.feasible_x, penalized.feasible_f
    else:
        x = problem.prepare(result.best.x_best)
        f = float(problem.objective(x))
    violation = problem.max_violation(x)
    return ConstrainedResult(result, x, f, violation <= FEASIBILITY_TOL, violation)


# cantilever beam

CANTILEVER_COEFFS = (61.0, 37.0, 19.0, 7.0, 1.0)


def _cantilever_weight(x):
    return 0.6224 * float(np.sum(x))


def _cantilever_deflection(x):
    return sum(c / xi ** 3 for c, xi in zip(CANTILEVER_COEFFS, x)) - 1.0


def cantilever_problem(penalty_rho=1e6, penalty_beta=2.0):
    return ConstrainedProblem(
        "cantilever", _cantilever_weight, [_cantilever_deflection],
        SearchSpace.box(5, 0.01, 100.0), penalty_rho, penalty_beta,
    )


# three-bar truss

def _truss_weight(x, l):
    return (2.0 * math.sqrt(2.0) * x[0] + x[1]) * l


def _truss_stress_1(x, P, sigma):
    den = math.sqrt(2.0) * x[0] ** 2 + 2.0 * x[0] * x[1]
    return (math.sqrt(2.0) * x[0] + x[1]) * P / den - sigma


def _truss_stress_2(x, P, sigma):
    den = math.sqrt(2.0) * x[0] ** 2 + 2.0 * x[0] * x[1]
    return x[1] * P / den - sigma


def _truss_stress_3(x, P, sigma):
    return P / (math.sqrt(2.0) * x[1] + x[0]) - sigma


def three_bar_truss_problem(l=1.0, P=2.0, sigma=2.0, penalty_rho=1e6, penalty_beta=2.0):
    if min(l, P, sigma) <= 0:
        raise ValueError("truss constants l, P and sigma must be positive")
    return ConstrainedProblem(
        "three-bar-truss",
        partial(_truss_weight, l=l),
        [partial(_truss_stress_1, P=P, sigma=sigma),
         partial(_truss_stress_2, P=P, sigma=sigma),
         partial(_truss_stress_3, P=P, sigma=sigma)],
        SearchSpace.box(2, 0.0, 1.0), penalty_rho, penalty_beta,
    )


# gear train

def _gear_error(x):
    e = GEAR_RATIO - (x[2] * x[1]) / (x[0] * x[3])
    return e * e


def gear_train_problem(penalty_rho=1e6, penalty_beta=2.0):
    return ConstrainedProblem(
        "gear-train", _gear_error, [], SearchSpace.box(4, 12.0, 60.0),
        penalty_rho, penalty_beta, integer_vars=frozenset(range(4)),
    )


def gear_train_exhaustive_oracle(low=12, high=60):
    """Global minimum of the gear-ratio error over every integer tuple in [low, high]^4.

    Returns ``(value, tuples)`` with all ``(x1, x2, x3, x4)`` attaining it.
    """
    return kernels.gear_scan(int(low), int(high), GEAR_RATIO)


PROBLEMS = {
    "cantilever": cantilever_problem,
    "three-bar-truss": three_bar_truss_problem,
    "gear-train": gear_train_problem,
}


def get_problem(name, **kwargs):
    try:
        factory = PROBLEMS[name]
    except KeyError:
        raise KeyError(f"unknown constrained problem {name!r}; known: {', '.join(PROBLEMS)}") from None
    return factory(**kwargs)
