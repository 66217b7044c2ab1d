"""Benchmark objective registry.

Two families share formulas: ``g1``-``g6`` and ``F1``-``F10``. Each entry
carries its default dimensionality, symmetric box, analytic minimum and (where
one is known) a minimizer. Evaluation goes through :mod:`perchopt.kernels`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .core import SearchSpace

__all__ = [
    "Benchmark",
    "ObjectiveSpec",
    "REGISTRY",
    "evaluate_benchmark",
    "get_spec",
    "known_optimum",
    "list_objectives",
    "make_objective",
]

# argmin of -x*sin(sqrt(|x|)) on [-500, 500] and the value there
SCHWEFEL_ARGMIN = 420.9687463599821
SCHWEFEL_MIN_PER_DIM = -418.98288727243374


@dataclass(frozen=True)
class ObjectiveSpec:
    name: str
    kernel: Callable[[np.ndarray], np.ndarray]
    bound: float
    default_dims: int = 30
    min_dims: int = 1
    fixed_dims: Optional[int] = None
    min_value: Callable[[int], float] = lambda m: 0.0
    minimizer: Optional[Callable[[int], np.ndarray]] = np.zeros
    deterministic: bool = True
    minimizer_unique: bool = True
    family: str = ""
    formula: str = ""

    @property
    def bounds(self):
        return (-self.bound, self.bound)

    def check_dims(self, dims):
        if self.fixed_dims is not None and dims != self.fixed_dims:
            raise ValueError(f"{self.name} is defined for exactly {self.fixed_dims} dimensions, got {dims}")
        if dims < self.min_dims:
            raise ValueError(f"{self.name} needs at least {self.min_dims} dimensions, got {dims}")

    def space(self, dims=None):
        dims = self.default_dims if dims is None else dims
        self.check_dims(dims)
        return SearchSpace.box(dims, -self.bound, self.bound)


def _g1(X):
    return kernels.shifted_sphere(X, 2.0, 2.0)


def _griewank(X):
    return kernels.griewank(X, False)


def _spec(name, kernel, bound, family, formula, **kw):
    return ObjectiveSpec(name=name, kernel=kernel, bound=bound, family=family, formula=formula, **kw)


REGISTRY = {
    s.name: s
    for s in [
        _spec("g1", _g1, 10.0, "unimodal", "sum((x_i + 2)^2) + 2",
              min_value=lambda m: 2.0, minimizer=lambda m: np.full(m, -2.0)),
        _spec("g2", kernels.sum_squares_plus_product, 10.0, "unimodal", "sum(|x_i^2|) + prod(|x_i|)"),
        _spec("g3", kernels.cumulative_sum_squares, 10.0, "unimodal", "sum_i (sum_{j<=i} x_j)^2"),
        _spec("g4", kernels.ackley, 5.12, "multimodal", "Ackley"),
        _spec("g5", kernels.goldstein_price, 10.0, "multimodal", "Goldstein-Price",
              default_dims=2, fixed_dims=2, min_value=lambda m: 3.0,
              minimizer=lambda m: np.array([0.0, -1.0])),
        _spec("g6", _griewank, 10.0, "multimodal", "Griewank, cos(x_i / sqrt(i))"),
        _spec("F1", kernels.sphere, 100.0, "unimodal", "sum(x_i^2)"),
        _spec("F2", kernels.sum_squares_plus_product, 10.0, "unimodal", "sum(|x_i^2|) + prod(|x_i|)"),
        _spec("F3", kernels.cumulative_sum_squares, 100.0, "unimodal", "sum_i (sum_{j<=i} x_j)^2"),
        _spec("F4", kernels.max_abs, 100.0, "unimodal", "max(|x_i|)"),
        _spec("F5", kernels.rosenbrock, 30.0, "unimodal", "Rosenbrock",
              min_dims=2, minimizer=np.ones),
        _spec("F6", kernels.step, 100.0, "unimodal", "sum(floor(x_i + 0.5)^2)",
              minimizer_unique=False),
        _spec("F7", kernels.quartic, 1.28, "unimodal", "sum(i * x_i^4) + uniform[0, 1)",
              deterministic=False),
        _spec("F8", kernels.schwefel, 500.0, "multimodal", "sum(-x_i sin(sqrt(|x_i|)))",
              min_value=lambda m: SCHWEFEL_MIN_PER_DIM * m,
              minimizer=lambda m: np.full(m, SCHWEFEL_ARGMIN)),
        _spec("F9", kernels.rastrigin, 5.12, "multimodal", "Rastrigin"),
        _spec("F10", kernels.ackley, 5.12, "multimodal", "Ackley"),
    ]
}


def get_spec(name):
    try:
        return REGISTRY[name]
    except KeyError:
        known = ", ".join(REGISTRY)
        raise KeyError(f"unknown objective {name!r}; known: {known}") from None


def list_objectives():
    return list(REGISTRY.values())


class Benchmark:
    """Registered objective bound to a dimensionality.

    Callable on a single point, with ``evaluate_batch`` for a whole swarm.
    The noisy quartic (F7) needs a random stream: pass ``rng`` or let the
    optimizer bind its own via :meth:`with_rng`. ``noise=False`` evaluates
    only its deterministic part.
    """

    def __init__(self, name, dims=None, *, rng=None, noise=True, printed_griewank=False):
        self.spec = get_spec(name)
        self.dims = self.spec.default_dims if dims is None else int(dims)
        self.spec.check_dims(self.dims)
        self.noise = noise and not self.spec.deterministic
        self.rng = rng
        self.printed_griewank = printed_griewank
        if printed_griewank and self.spec.kernel is not _griewank:
            raise ValueError("printed_griewank only applies to g6")

    @property
    def name(self):
        return self.spec.name

    @property
    def space(self):
        return self.spec.space(self.dims)

    @property
    def deterministic(self):
        return not self.noise

    def with_rng(self, rng):
        if not self.noise:
            return self
        return Benchmark(self.name, self.dims, rng=rng, noise=True,
                         printed_griewank=self.printed_griewank)

    def evaluate_batch(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.dims:
            raise ValueError(f"{self.name} expects rows of length {self.dims}, got shape {X.shape}")
        if self.printed_griewank:
            values = kernels.griewank(X, True)
        else:
            values = self.spec.kernel(X)
        if self.noise:
            if self.rng is None:
                raise ValueError(f"{self.name} is noisy: pass a random stream (rng=...) or noise=False")
            values = values + self.rng.uniform(0.0, 1.0, X.shape[0])
        return values

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1:
            raise ValueError("expected a single point (1-D array)")
        return float(self.evaluate_batch(x[np.newaxis, :])[0])

    def __repr__(self):
        return f"Benchmark({self.name!r}, dims={self.dims})"

    def __reduce__(self):
        # ObjectiveSpec holds lambdas; rebuild from the registry instead of pickling it
        return (_rebuild, (self.name, self.dims, self.rng, self.noise, self.printed_griewank))


def _rebuild(name, dims, rng, noise, printed_griewank):
    return Benchmark(name, dims, rng=rng, noise=noise, printed_griewank=printed_griewank)


def make_objective(name, dims=None, *, rng=None, noise=True, printed_griewank=False):
    return Benchmark(name, dims, rng=rng, noise=noise, printed_griewank=printed_griewank)


def evaluate_benchmark(name, x, *, rng=None, noise=True, printed_griewank=False):
    x = np.asarray(x, dtype=np.float64)
    return Benchmark(name, x.size, rng=rng, noise=noise, printed_griewank=printed_griewank)(x)


def known_optimum(name, dims=None):
    """Analytic minimum value and a minimizer (``None`` when not available).

    For the noisy quartic the value refers to its noise-free part.
    """
    spec = get_spec(name)
    dims = spec.default_dims if dims is None else dims
    spec.check_dims(dims)
    x = None if spec.minimizer is None else np.asarray(spec.minimizer(dims), dtype=np.float64)
    return float(spec.min_value(dims)), x


def describe(spec):
    lo, hi = spec.bounds
    dims = str(spec.fixed_dims) if spec.fixed_dims else str(spec.default_dims)
    fmin = "-418.9829 x dims" if spec.name == "F8" else f"{spec.min_value(spec.default_dims):g}"
    return {"name": spec.name, "dims": dims, "bounds": f"[{lo:g}, {hi:g}]", "f_min": fmin,
            "family": spec.family, "formula": spec.formula}

