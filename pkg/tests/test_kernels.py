import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from perchopt import kernels
from perchopt.constrained import GEAR_RATIO

BACKENDS = kernels.available_backends()
PY = kernels.load("python")

BATCH_KERNELS = [
    "sphere", "sum_squares_plus_product", "cumulative_sum_squares", "max_abs", "rosenbrock",
    "step", "quartic", "schwefel", "rastrigin", "ackley",
]


def test_python_backend_always_available():
    assert "python" in BACKENDS
    assert kernels.BACKEND in BACKENDS


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        kernels.load("fortran")


@pytest.mark.parametrize("backend", BACKENDS)
def test_every_backend_exports_all_kernels(backend):
    mod = kernels.load(backend)
    for name in kernels.KERNEL_NAMES:
        assert callable(getattr(mod, name)), name


@pytest.mark.skipif("compiled" not in BACKENDS, reason="extension not built")
@pytest.mark.parametrize("name", BATCH_KERNELS + ["griewank", "griewank_printed", "shifted_sphere"])
def test_backends_agree(name):
    comp = kernels.load("compiled")
    rng = np.random.default_rng(0)
    X = rng.uniform(-50, 50, (64, 7))
    if name == "griewank_printed":
        a, b = comp.griewank(X, True), PY.griewank(X, True)
    elif name == "griewank":
        a, b = comp.griewank(X, False), PY.griewank(X, False)
    elif name == "shifted_sphere":
        a, b = comp.shifted_sphere(X, 2.0, 2.0), PY.shifted_sphere(X, 2.0, 2.0)
    else:
        a, b = getattr(comp, name)(X), getattr(PY, name)(X)
    # libm and numpy transcendental functions may differ in the last ulp
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-13)


@pytest.mark.skipif("compiled" not in BACKENDS, reason="extension not built")
def test_backends_agree_goldstein_price_and_gear():
    comp = kernels.load("compiled")
    X = np.random.default_rng(1).uniform(-2, 2, (50, 2))
    np.testing.assert_allclose(comp.goldstein_price(X), PY.goldstein_price(X), rtol=1e-13)
    va, ta = comp.gear_scan(12, 30, GEAR_RATIO)
    vb, tb = PY.gear_scan(12, 30, GEAR_RATIO)
    assert va == vb and ta == tb


@pytest.mark.parametrize("backend", BACKENDS)
def test_known_values(backend):
    k = kernels.load(backend)
    z = np.zeros((1, 30))
    for name in BATCH_KERNELS:
        if name in ("rosenbrock", "schwefel"):
            continue
        assert k.__dict__[name](z)[0] == pytest.approx(0.0, abs=1e-15), name
    assert k.rosenbrock(np.ones((1, 30)))[0] == 0.0
    assert k.shifted_sphere(np.full((1, 4), -2.0), 2.0, 2.0)[0] == 2.0
    assert k.goldstein_price(np.array([[0.0, -1.0]]))[0] == pytest.approx(3.0, abs=1e-12)
    assert k.griewank(np.zeros((1, 5)), False)[0] == 0.0
    # Rastrigin at (1, 1) is 2 and Rosenbrock at the origin is m - 1
    assert k.rastrigin(np.ones((1, 2)))[0] == pytest.approx(2.0, abs=1e-12)
    assert k.rosenbrock(np.zeros((1, 5)))[0] == 4.0


@pytest.mark.parametrize("backend", BACKENDS)
def test_step_rounds_half_up(backend):
    k = kernels.load(backend)
    X = np.array([[0.49, -0.5, 0.5, 1.5]])
    # floor(x + 0.5): 0, 0, 1, 2
    assert k.step(X)[0] == 0 + 0 + 1 + 4


@pytest.mark.parametrize("backend", BACKENDS)
def test_quartic_weights_are_one_based(backend):
    k = kernels.load(backend)
    assert k.quartic(np.array([[1.0, 1.0, 1.0]]))[0] == 1 + 2 + 3


@pytest.mark.parametrize("backend", BACKENDS)
def test_goldstein_price_rejects_other_dims(backend):
    k = kernels.load(backend)
    with pytest.raises(ValueError):
        k.goldstein_price(np.zeros((1, 3)))


@pytest.mark.parametrize("backend", BACKENDS)
def test_gear_scan_matches_itertools(backend):
    k = kernels.load(backend)
    value, tuples = k.gear_scan(12, 13, GEAR_RATIO)
    errs = {}
    for t in itertools.product(range(12, 14), repeat=4):
        e = GEAR_RATIO - (t[1] * t[2]) / (t[0] * t[3])
        errs[t] = e * e
    best = min(errs.values())
    assert value == best
    assert tuples == sorted(t for t, v in errs.items() if v == best)


@pytest.mark.parametrize("backend", BACKENDS)
def test_gear_scan_rejects_empty_range(backend):
    with pytest.raises(ValueError):
        kernels.load(backend).gear_scan(20, 12, GEAR_RATIO)


rows = arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)),
              elements=st.floats(-100, 100, allow_nan=False))


@settings(max_examples=60, deadline=None)
@given(rows)
def test_nonnegative_kernels(X):
    for name in ["sphere", "sum_squares_plus_product", "cumulative_sum_squares", "max_abs",
                 "step", "quartic", "rastrigin"]:
        assert np.all(getattr(kernels, name)(X) >= 0), name
    assert np.all(kernels.ackley(X) >= -1e-12)
    assert np.all(kernels.griewank(X, False) >= -1e-12)


@settings(max_examples=60, deadline=None)
@given(rows)
def test_even_kernels_are_symmetric(X):
    for name in ["sphere", "sum_squares_plus_product", "cumulative_sum_squares", "max_abs",
                 "quartic", "rastrigin", "ackley"]:
        f = getattr(kernels, name)
        np.testing.assert_allclose(f(X), f(-X), rtol=1e-12, atol=1e-12, err_msg=name)


def test_sphere_against_plain_python():
    X = np.random.default_rng(3).normal(size=(5, 4))
    expected = [math.fsum(v * v for v in row) for row in X]
    np.testing.assert_allclose(kernels.sphere(X), expected, rtol=1e-14)
