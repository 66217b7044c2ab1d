"""Evaluation kernels with backend selection at import.

The compiled extension ``perchopt._kernels`` is used when it was built;
otherwise (or when ``PERCHOPT_PURE_PYTHON`` is set to a non-empty value) the
numpy implementation in ``perchopt._pykernels`` is used. Both expose the same
functions.
"""
import importlib
import os

_MODULES = {"compiled": "perchopt._kernels", "python": "perchopt._pykernels"}

KERNEL_NAMES = (
    "sphere",
    "shifted_sphere",
    "sum_squares_plus_product",
    "cumulative_sum_squares",
    "max_abs",
    "rosenbrock",
    "step",
    "quartic",
    "schwefel",
    "rastrigin",
    "ackley",
    "griewank",
    "goldstein_price",
    "gear_scan",
)


def load(backend):
    """Return the kernel module for ``backend`` ('compiled' or 'python')."""
    try:
        name = _MODULES[backend]
    except KeyError:
        raise ValueError(f"unknown kernel backend {backend!r}") from None
    return importlib.import_module(name)


def available_backends():
    found = []
    for backend in _MODULES:
        try:
            load(backend)
        except ImportError:
            continue
        found.append(backend)
    return found


def _select():
    if os.environ.get("PERCHOPT_PURE_PYTHON"):
        return "python", load("python")
    try:
        return "compiled", load("compiled")
    except ImportError:
        return "python", load("python")


BACKEND, _impl = _select()

sphere = _impl.sphere
shifted_sphere = _impl.shifted_sphere
sum_squares_plus_product = _impl.sum_squares_plus_product
cumulative_sum_squares = _impl.cumulative_sum_squares
max_abs = _impl.max_abs
rosenbrock = _impl.rosenbrock
step = _impl.step
quartic = _impl.quartic
schwefel = _impl.schwefel
rastrigin = _impl.rastrigin
ackley = _impl.ackley
griewank = _impl.griewank
goldstein_price = _impl.goldstein_price
gear_scan = _impl.gear_scan
