"""Pure numpy kernels, used when the compiled extension is unavailable.

Every reduction accumulates coordinates left to right, one column at a time,
so that the arithmetic matches the compiled loops operation for operation.
"""
import math

import numpy as np

TWO_PI = 2.0 * math.pi


def _cols(X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("expected a 2-D array of shape (rows, dims)")
    return X


def sphere(X):
    X = _cols(X)
    acc = np.zeros(X.shape[0])
    for j in range(X.shape[1]):
        c = X[:, j]
        acc += c * c
    return acc


def shifted_sphere(X, shift, offset):
    X = _cols(X)
    acc = np.zeros(X.shape[0])
    for j in range(X.shape[1]):
        c = X[:, j] + shift
        acc += c * c
    return acc + offset


def sum_squares_plus_product(X):
    X = _cols(X)
    acc = np.zeros(X.shape[0])
    prod = np.ones(X.shape[0])
    for j in range(X.shape[1]):
        c = X[:, j]
        acc += c * c
        prod *= np.abs(c)
    return acc + prod


def cumulative_sum_squares(X):
    X = _cols(X)
    acc = np.zeros(X.shape[0])
    run = np.zeros(X.shape[0])
    for j in range(X.shape[1]):
        run += X[:, j]
        acc += run * run
    return acc


def max_abs(X):
    X = _cols(X)
    out = np.zeros(X.shape[0])
    for j in range(X.shape[1]):
        np.maximum(out, np.abs(X[:, j]), out=out)
    return out


def rosenbrock(X):
    X = _cols(X)
    acc = np.zeros(X.shape[0])
    for j in range(X.shape[1] - 1):
        a = X[:, j + 1] - X[:, j] * X[:, j]
        b = X[:, j] - 1.0
        acc += 100.0 * a * a + b * b
    return acc


def step(X):
    X = _cols(X)
    acc = np.zeros(X.shape[0])
    for j in range(X.shape[1]):
        c = np.floor(X[:, j] + 0.5)
        acc += c * c
    return acc


def quartic(X):
    X = _cols(X)
    acc = np.zeros(X.shape[0])
    for j in range(X.shape[1]):
        c2 = X[:, j] * X[:, j]
        acc += (j + 1.0) * (c2 * c2)
    return acc


def schwefel(X):
    X = _cols(X)
    acc = np.zeros(X.shape[0])
    for j in range(X.shape[1]):
        c = X[:, j]
        acc += -c * np.sin(np.sqrt(np.abs(c)))
    return acc


def rastrigin(X):
    X = _cols(X)
    acc = np.zeros(X.shape[0])
    for j in range(X.shape[1]):
        c = X[:, j]
        acc += c * c - 10.0 * np.cos(TWO_PI * c) + 10.0
    return acc


def ackley(X):
    X = _cols(X)
    m = X.shape[1]
    s1 = np.zeros(X.shape[0])
    s2 = np.zeros(X.shape[0])
    for j in range(m):
        c = X[:, j]
        s1 += c * c
        s2 += np.cos(TWO_PI * c)
    return -20.0 * np.exp(-0.2 * np.sqrt(s1 / m)) - np.exp(s2 / m) + 20.0 + math.e


def griewank(X, printed=False):
    X = _cols(X)
    acc = np.zeros(X.shape[0])
    prod = np.ones(X.shape[0])
    for j in range(X.shape[1]):
        c = X[:, j]
        acc += c * c
        div = (j + 1.0) if printed else math.sqrt(j + 1.0)
        prod *= np.cos(c / div)
    return acc / 4000.0 - prod + 1.0


def goldstein_price(X):
    X = _cols(X)
    if X.shape[1] != 2:
        raise ValueError("goldstein_price is defined for 2 dimensions only")
    x, y = X[:, 0], X[:, 1]
    a = x + y + 1.0
    b = 19.0 - 14.0 * x + 3.0 * x * x - 14.0 * y + 6.0 * x * y + 3.0 * y * y
    c = 2.0 * x - 3.0 * y
    d = 18.0 - 32.0 * x + 12.0 * x * x + 48.0 * y - 36.0 * x * y + 27.0 * y * y
    return (1.0 + a * a * b) * (30.0 + c * c * d)


def gear_scan(lo, hi, target):
    """Exhaustive search of the gear-ratio error over [lo, hi]^4.

    Returns the minimum of ``(target - x3*x2/(x1*x4))**2`` and every
    integer tuple ``(x1, x2, x3, x4)`` attaining it, in lexicographic order.
    """
    if hi < lo:
        raise ValueError("empty range")
    teeth = np.arange(lo, hi + 1, dtype=np.int64)
    # numerator x2*x3 varies along columns, denominator x1*x4 along rows
    den = np.multiply.outer(teeth, teeth).ravel()  # (x1, x4)
    num = np.multiply.outer(teeth, teeth).ravel()  # (x2, x3)
    ratio = num[None, :].astype(np.float64) / den[:, None].astype(np.float64)
    err = target - ratio
    err *= err
    best = float(err.min())
    n = teeth.size
    hits = np.argwhere(err == best)
    tuples = []
    for d, u in hits:
        x1, x4 = divmod(int(d), n)
        x2, x3 = divmod(int(u), n)
        tuples.append((int(teeth[x1]), int(teeth[x2]), int(teeth[x3]), int(teeth[x4])))
    tuples.sort()
    return best, tuples
