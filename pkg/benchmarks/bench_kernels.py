"""Compare the compiled and pure-numpy kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

Times batch evaluation of every benchmark kernel on a 30 x 30 swarm (the
optimizer's default shape), the exhaustive gear-train scan, and one full
optimizer run per backend.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from perchopt import kernels
from perchopt.constrained import GEAR_RATIO

BATCH = ["sphere", "sum_squares_plus_product", "cumulative_sum_squares", "max_abs", "rosenbrock",
         "step", "quartic", "schwefel", "rastrigin", "ackley"]

END_TO_END = """
from perchopt import EpoConfig, make_objective, run, BACKEND
obj = make_objective('F9', 30)
run(EpoConfig(seed=1), obj.space, obj)
"""


def best_of(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def end_to_end(backend, repeat):
    env = dict(os.environ)
    env.pop("PERCHOPT_PURE_PYTHON", None)
    if backend == "python":
        env["PERCHOPT_PURE_PYTHON"] = "1"
    code = ("import timeit\n"
            f"print(min(timeit.repeat({END_TO_END!r}, repeat={repeat}, number=1)))")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    backends = kernels.available_backends()
    mods = {b: kernels.load(b) for b in backends}
    X = np.random.default_rng(0).uniform(-5, 5, (30, 30))
    print(f"backends: {', '.join(backends)}")
    header = f"{'kernel':<26}" + "".join(f"{b + ' (us)':>16}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)

    def row(label, times):
        line = f"{label:<26}" + "".join(f"{t * 1e6:>16.2f}" for t in times)
        if len(times) == 2:
            line += f"{times[1] / times[0]:>9.1f}x"
        print(line)

    for name in BATCH:
        row(name, [best_of(lambda m=mods[b]: getattr(m, name)(X), args.repeat, 2000) for b in backends])
    row("griewank", [best_of(lambda m=mods[b]: m.griewank(X, False), args.repeat, 2000) for b in backends])
    row("gear_scan 12..60", [best_of(lambda m=mods[b]: m.gear_scan(12, 60, GEAR_RATIO), args.repeat, 1)
                             for b in backends])
    row("run F9 dim 30 (500 it)", [end_to_end(b, args.repeat) for b in backends])


if __name__ == "__main__":
    main()
