"""Eagle Perching Optimizer state machine.

A swarm of ``k`` candidate points is re-sampled each iteration inside a box
of half-width ``l_scale`` (around the incumbent by default). The box shrinks
by a factor ``eta`` per iteration, moving the search from exploration of the
whole domain to exploitation near the incumbent. Three variants are covered:

* constant ``eta`` derived from the target resolution (:class:`DerivedEta`),
* ``eta`` ramped linearly from ``eta_max`` to ``eta_min`` (:class:`LinearEta`),
* either of the above plus elite averaging (``elite_count > 0``): the mean of
  the ``n`` best particles is evaluated as one extra candidate per iteration.

All functions minimize. Objectives are callables taking an ``(m,)`` array and
returning a float; if they also provide ``evaluate_batch(X)`` the swarm is
evaluated in one call.
"""
from __future__ import annotations

import enum
import math
import secrets
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Union

import numpy as np

__all__ = [
    "BestRecord",
    "ConfigError",
    "DerivedEta",
    "EpoConfig",
    "LinearEta",
    "PerturbCenter",
    "PerturbDist",
    "RunResult",
    "SearchSpace",
    "ShrinkMode",
    "SwarmState",
    "apply_step",
    "derive_eta",
    "elite_average",
    "epo_step",
    "evaluate_swarm",
    "initialize",
    "iterate",
    "linear_eta",
    "random_search",
    "run",
    "sample_perturbation",
    "shrink_scale",
    "update_best",
]

Objective = Callable[[np.ndarray], float]


class ConfigError(ValueError):
    """Invalid optimizer configuration or out-of-domain parameter."""


@dataclass(frozen=True, eq=False)
class SearchSpace:
    """Axis-aligned box ``lower <= x <= upper``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=np.float64)).copy()
        upper = np.atleast_1d(np.asarray(self.upper, dtype=np.float64)).copy()
        if lower.ndim != 1 or lower.shape != upper.shape or lower.size == 0:
            raise ConfigError("lower and upper must be 1-D arrays of equal, non-zero length")
        if not np.all(lower < upper):
            raise ConfigError("every lower bound must be strictly below its upper bound")
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def box(cls, dims, low, high):
        if dims < 1:
            raise ConfigError("dims must be >= 1")
        return cls(np.full(dims, float(low)), np.full(dims, float(high)))

    @property
    def dims(self):
        return self.lower.size

    @property
    def width(self):
        return self.upper - self.lower

    def contains(self, X):
        X = np.asarray(X)
        return bool(np.all((X >= self.lower) & (X <= self.upper)))

    def clamp(self, X, out=None):
        return np.clip(X, self.lower, self.upper, out=out)

    def __eq__(self, other):
        if not isinstance(other, SearchSpace):
            return NotImplemented
        return np.array_equal(self.lower, other.lower) and np.array_equal(self.upper, other.upper)

    def __hash__(self):
        return hash((self.lower.tobytes(), self.upper.tobytes()))


@dataclass(frozen=True)
class DerivedEta:
    """Constant shrink factor ``(res / l_scale0) ** (1 / iterations)``."""


@dataclass(frozen=True)
class LinearEta:
    """Shrink factor ramped linearly from ``eta_max`` (t=0) to ``eta_min`` (t=t_s)."""

    eta_max: float = 0.9
    eta_min: float = 0.8

    def __post_init__(self):
        if not 0.0 < self.eta_min <= self.eta_max < 1.0:
            raise ConfigError(
                f"linear eta needs 0 < eta_min <= eta_max < 1, got "
                f"eta_max={self.eta_max}, eta_min={self.eta_min}"
            )


EtaSchedule = Union[DerivedEta, LinearEta]


class ShrinkMode(str, enum.Enum):
    EVERY_ITERATION = "every"
    ON_IMPROVEMENT = "improvement"


class PerturbCenter(str, enum.Enum):
    BEST = "best"
    SELF = "self"


class PerturbDist(str, enum.Enum):
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"


def derive_eta(res, l_scale0, t_s):
    """Constant shrink factor that takes ``l_scale0`` down to ``res`` in ``t_s`` steps."""
    if t_s < 1:
        raise ConfigError("t_s must be >= 1")
    if not res > 0:
        raise ConfigError(f"res must be positive, got {res}")
    if not res < l_scale0:
        raise ConfigError(
            f"res ({res}) must be smaller than l_scale0 ({l_scale0}); otherwise eta >= 1 "
            "and the search radius grows instead of shrinking"
        )
    eta = (res / l_scale0) ** (1.0 / t_s)
    if not 0.0 < eta < 1.0:
        raise ConfigError(f"res / l_scale0 = {res / l_scale0!r} gives eta = {eta!r} over {t_s} steps; "
                          "the shrink factor must lie strictly inside (0, 1)")
    return eta


def linear_eta(t, t_s, eta_max, eta_min):
    if t_s < 1:
        raise ConfigError("t_s must be >= 1")
    if not 0 <= t <= t_s:
        raise ConfigError(f"t={t} outside [0, {t_s}]")
    if not 0.0 < eta_min <= eta_max < 1.0:
        raise ConfigError(f"need 0 < eta_min <= eta_max < 1, got ({eta_max}, {eta_min})")
    return eta_max - t * (eta_max - eta_min) / t_s


def shrink_scale(l_scale, eta, scale_offset=0.0):
    return l_scale * eta + scale_offset


@dataclass(frozen=True)
class EpoConfig:
    """Full parameterization of one optimizer run.

    Defaults are the modified-EPO settings: 30 particles, 500 iterations,
    initial radius 500, resolution 0.05 and eta ramped from 0.9 to 0.8.
    ``seed=None`` draws a seed from system entropy when the run starts.
    """

    particles: int = 30
    iterations: int = 500
    l_scale0: float = 500.0
    res: float = 0.05
    eta_schedule: EtaSchedule = field(default_factory=LinearEta)
    scale_offset: float = 0.0
    elite_count: int = 0
    shrink_mode: ShrinkMode = ShrinkMode.EVERY_ITERATION
    perturb_center: PerturbCenter = PerturbCenter.BEST
    perturb_dist: PerturbDist = PerturbDist.UNIFORM
    seed: int | None = None

    def __post_init__(self):
        for name, enum_type in (
            ("shrink_mode", ShrinkMode),
            ("perturb_center", PerturbCenter),
            ("perturb_dist", PerturbDist),
        ):
            value = getattr(self, name)
            try:
                object.__setattr__(self, name, enum_type(value))
            except ValueError:
                choices = ", ".join(e.value for e in enum_type)
                raise ConfigError(f"{name} must be one of {choices}, got {value!r}") from None
        self.validate()

    def validate(self):
        if int(self.particles) != self.particles or self.particles < 1:
            raise ConfigError("particles must be a positive integer")
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ConfigError("iterations must be a positive integer")
        if not self.l_scale0 > 0:
            raise ConfigError("l_scale0 must be positive")
        if not self.res > 0:
            raise ConfigError("res must be positive")
        if not self.res < self.l_scale0:
            raise ConfigError(
                f"res ({self.res}) must be smaller than l_scale0 ({self.l_scale0}); "
                "otherwise eta >= 1 and the search radius grows instead of shrinking"
            )
        if not 0.0 <= self.scale_offset < 1.0:
            raise ConfigError("scale_offset must lie in [0, 1)")
        if int(self.elite_count) != self.elite_count or not 0 <= self.elite_count <= self.particles:
            raise ConfigError("elite_count must be an integer in [0, particles]")
        if not isinstance(self.eta_schedule, (DerivedEta, LinearEta)):
            raise ConfigError("eta_schedule must be DerivedEta() or LinearEta(...)")
        if self.seed is not None and not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")

    def eta_at(self, t):
        """Shrink factor in effect at iteration ``t``."""
        sched = self.eta_schedule
        if isinstance(sched, LinearEta):
            return linear_eta(t, self.iterations, sched.eta_max, sched.eta_min)
        return derive_eta(self.res, self.l_scale0, self.iterations)

    def evaluations_per_run(self):
        """Objective calls made by :func:`run`, including the initial evaluation."""
        return self.particles * (self.iterations + 1) + (self.iterations if self.elite_count else 0)

    def replace(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        sched = self.eta_schedule
        if isinstance(sched, LinearEta):
            schedule = {"kind": "linear", "eta_max": sched.eta_max, "eta_min": sched.eta_min}
        else:
            schedule = {"kind": "derived"}
        return {
            "particles": self.particles,
            "iterations": self.iterations,
            "l_scale0": self.l_scale0,
            "res": self.res,
            "eta_schedule": schedule,
            "scale_offset": self.scale_offset,
            "elite_count": self.elite_count,
            "shrink_mode": self.shrink_mode.value,
            "perturb_center": self.perturb_center.value,
            "perturb_dist": self.perturb_dist.value,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        schedule = data.pop("eta_schedule", {"kind": "linear"})
        if schedule.get("kind") == "derived":
            data["eta_schedule"] = DerivedEta()
        else:
            data["eta_schedule"] = LinearEta(
                schedule.get("eta_max", 0.9), schedule.get("eta_min", 0.8)
            )
        return cls(**data)


@dataclass
class SwarmState:
    positions: np.ndarray
    values: np.ndarray
    l_scale: float
    eta: float
    t: int = 0


@dataclass(frozen=True, eq=False)
class BestRecord:
    x_best: np.ndarray
    y_best: float


@dataclass(eq=False)
class RunResult:
    best: BestRecord
    trace: np.ndarray  # rows of (t, y_best, l_scale), t = 0 is the initial evaluation
    evaluations: int
    elapsed: float
    seed: int


def sample_perturbation(state, space, config, rng):
    """Draw the step matrix for every particle, scaled by the current radius."""
    shape = state.positions.shape
    if config.perturb_dist is PerturbDist.GAUSSIAN:
        return state.l_scale * rng.standard_normal(shape)
    return state.l_scale * rng.uniform(-1.0, 1.0, shape)


def apply_step(state, delta, space, center, best):
    """Move the swarm by ``delta`` and clamp to the box.

    ``center='best'`` re-samples every particle around the incumbent;
    ``center='self'`` walks each particle from its own position.
    """
    if PerturbCenter(center) is PerturbCenter.BEST:
        positions = best.x_best[np.newaxis, :] + delta
    else:
        positions = state.positions + delta
    return space.clamp(positions, out=positions)


def evaluate_swarm(positions, objective):
    """Evaluate every row; non-finite results are mapped to ``+inf``."""
    batch = getattr(objective, "evaluate_batch", None)
    if batch is not None:
        values = np.array(batch(positions), dtype=np.float64)
    else:
        values = np.fromiter((objective(row) for row in positions), dtype=np.float64, count=len(positions))
    values[~np.isfinite(values)] = np.inf
    return values


def _evaluate_point(x, objective):
    return float(evaluate_swarm(x[np.newaxis, :], objective)[0])


def update_best(values, positions, best):
    """Accept the best row if it strictly improves on the incumbent.

    Ties between rows go to the lowest index. Non-finite values never win.
    """
    values = np.asarray(values, dtype=np.float64)
    finite = np.isfinite(values)
    if not finite.any():
        return best
    masked = np.where(finite, values, np.inf)
    i = int(np.argmin(masked))
    if masked[i] < best.y_best:
        return BestRecord(np.array(positions[i], dtype=np.float64), float(masked[i]))
    return best


def elite_average(values, positions, n, objective, best):
    """Evaluate the centroid of the ``n`` best rows and offer it as a candidate."""
    k = len(values)
    if not 1 <= n <= k:
        raise ConfigError(f"elite count must be in [1, {k}], got {n}")
    values = np.where(np.isfinite(values), values, np.inf)
    order = np.argsort(values, kind="stable")[:n]
    x_avg = positions[order].mean(axis=0)
    y_avg = _evaluate_point(x_avg, objective)
    return update_best(np.array([y_avg]), x_avg[np.newaxis, :], best)


def epo_step(state, best, config, space, objective, rng):
    """Advance the swarm by one iteration; returns the new ``(state, best)``."""
    if state.t >= config.iterations:
        raise ConfigError("run already completed all iterations")
    delta = sample_perturbation(state, space, config, rng)
    positions = apply_step(state, delta, space, config.perturb_center, best)
    values = evaluate_swarm(positions, objective)
    new_best = update_best(values, positions, best)
    if config.elite_count > 0:
        new_best = elite_average(values, positions, config.elite_count, objective, new_best)
    improved = new_best is not best
    l_scale = state.l_scale
    if config.shrink_mode is ShrinkMode.EVERY_ITERATION or improved:
        l_scale = shrink_scale(l_scale, state.eta, config.scale_offset)
    t = state.t + 1
    eta = config.eta_at(t) if isinstance(config.eta_schedule, LinearEta) else state.eta
    return SwarmState(positions, values, l_scale, eta, t), new_best


def _bind_stream(objective, rng):
    # stochastic objectives (noisy quartic) draw their noise from the run's stream
    with_rng = getattr(objective, "with_rng", None)
    return with_rng(rng) if with_rng is not None else objective


def initialize(config, space, objective, rng):
    """Uniform random swarm inside the box and the incumbent from its evaluation."""
    positions = rng.uniform(space.lower, space.upper, (config.particles, space.dims))
    values = evaluate_swarm(positions, objective)
    finite = np.isfinite(values)
    if finite.any():
        i = int(np.argmin(np.where(finite, values, np.inf)))
    else:
        i = 0
    best = BestRecord(positions[i].copy(), float(values[i]))
    state = SwarmState(positions, values, float(config.l_scale0), config.eta_at(0), 0)
    return state, best


def _resolve_seed(seed):
    return secrets.randbits(64) if seed is None else int(seed)


def iterate(config, space, objective, rng=None) -> Iterator[tuple[SwarmState, BestRecord]]:
    """Yield ``(state, best)`` after initialization and after every iteration."""
    config.validate()
    if rng is None:
        rng = np.random.default_rng(_resolve_seed(config.seed))
    objective = _bind_stream(objective, rng)
    state, best = initialize(config, space, objective, rng)
    yield state, best
    while state.t < config.iterations:
        state, best = epo_step(state, best, config, space, objective, rng)
        yield state, best


def run(config, space, objective):
    """Run the optimizer for ``config.iterations`` iterations."""
    config.validate()
    seed = _resolve_seed(config.seed)
    rng = np.random.default_rng(seed)
    trace = np.empty((config.iterations + 1, 3))
    start = time.perf_counter()
    for state, best in iterate(config, space, objective, rng):
        trace[state.t] = (state.t, best.y_best, state.l_scale)
    elapsed = time.perf_counter() - start
    return RunResult(best, trace, config.evaluations_per_run(), elapsed, seed)


def random_search(space, objective, evaluations, seed=None, batch=30):
    """Uniform random sampling baseline with the same result type as :func:`run`."""
    if evaluations < 1:
        raise ConfigError("evaluations must be >= 1")
    seed = _resolve_seed(seed)
    rng = np.random.default_rng(seed)
    objective = _bind_stream(objective, rng)
    best = BestRecord(np.full(space.dims, np.nan), math.inf)
    rows = []
    done = 0
    start = time.perf_counter()
    while done < evaluations:
        n = min(batch, evaluations - done)
        X = rng.uniform(space.lower, space.upper, (n, space.dims))
        best = update_best(evaluate_swarm(X, objective), X, best)
        done += n
        rows.append((len(rows), best.y_best, math.nan))
    elapsed = time.perf_counter() - start
    return RunResult(best, np.array(rows), done, elapsed, seed)
