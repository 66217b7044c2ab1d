"""Command-line entry point: ``perchopt <subcommand> ...``."""
from __future__ import annotations

import argparse
import csv
import secrets
import sys
from pathlib import Path

from . import __version__
from .constrained import PROBLEMS, gear_train_exhaustive_oracle, get_problem
from .core import ConfigError, DerivedEta, EpoConfig, LinearEta, SearchSpace
from .harness import (
    ExperimentPlan,
    convergence_probability_study,
    eta_sweep,
    export_results,
    first_reach,
    jobs_from_env,
    output_name,
    run_experiment,
    surface_grid,
    write_surface,
)
from .objectives import REGISTRY, describe, get_spec, make_objective


class CliError(Exception):
    pass


def _add_epo_args(p, schedule="linear"):
    g = p.add_argument_group("optimizer")
    g.add_argument("--particles", type=int, default=30)
    g.add_argument("--iterations", type=int, default=500)
    g.add_argument("--l-scale", dest="l_scale", type=float, default=500.0, help="initial search radius")
    g.add_argument("--res", type=float, default=0.05, help="final resolution (derived schedule)")
    g.add_argument("--schedule", choices=["linear", "derived"], default=schedule)
    g.add_argument("--eta-max", type=float, default=0.9)
    g.add_argument("--eta-min", type=float, default=0.8)
    g.add_argument("--scale-offset", type=float, default=0.0)
    g.add_argument("--elite", type=int, default=0, help="elite averaging count (0 disables)")
    g.add_argument("--shrink", choices=["every", "improvement"], default="every")
    g.add_argument("--center", choices=["best", "self"], default="best")
    g.add_argument("--dist", choices=["uniform", "gaussian"], default="uniform")
    g.add_argument("--seed", type=int, default=None, help="base seed (default: drawn from entropy and printed)")


def _add_output_args(p):
    p.add_argument("--output", "-o", default=None, help="file or existing directory")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--no-traces", dest="traces", action="store_false", help="skip per-run trace files")


def _add_runs_args(p, runs=30):
    p.add_argument("--runs", type=int, default=runs)
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: $PERCHOPT_JOBS or 1)")


def build_parser():
    parser = argparse.ArgumentParser(prog="perchopt", description="Eagle Perching Optimizer toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    subparsers = {}

    def add(name, help, **kw):
        p = sub.add_parser(name, help=help, **kw)
        p.add_argument("--config", default=None, help="key=value file; flags override it")
        subparsers[name] = p
        return p

    p = add("bench", "run a benchmark-function experiment")
    p.add_argument("problem")
    p.add_argument("--dims", type=int, default=None)
    p.add_argument("--printed-griewank", action="store_true", help="g6 with cos(x_i / i)")
    _add_epo_args(p)
    _add_runs_args(p)
    _add_output_args(p)

    p = add("constrained", "run a constrained engineering design problem")
    p.add_argument("problem", choices=list(PROBLEMS))
    p.add_argument("--truss-l", type=float, default=1.0)
    p.add_argument("--truss-p", type=float, default=2.0)
    p.add_argument("--truss-sigma", type=float, default=2.0)
    p.add_argument("--penalty-rho", type=float, default=1e6)
    p.add_argument("--penalty-beta", type=float, default=2.0)
    _add_epo_args(p)
    _add_runs_args(p)
    _add_output_args(p)

    p = add("sweep-eta", "compare eta ramps on one problem")
    p.add_argument("problem")
    p.add_argument("--dims", type=int, default=None)
    p.add_argument("--ranges", default="0.9:0.9,0.9:0.8,0.9:0.7,0.9:0.6",
                   help="comma-separated eta_max:eta_min pairs")
    _add_epo_args(p)
    _add_runs_args(p)
    p.add_argument("--output", "-o", default=None, help="CSV of median traces, one column per range")

    p = add("converge-study", "empirical probability of landing near the optimum")
    p.add_argument("problem")
    p.add_argument("--dims", type=int, default=None)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--t-values", default="0,50,150,500")
    p.add_argument("--trials", type=int, default=100)
    _add_epo_args(p, schedule="derived")

    p = add("oracle", "exhaustive gear-train optimum")
    p.add_argument("problem", choices=["gear-train"])
    p.add_argument("--low", type=int, default=12)
    p.add_argument("--high", type=int, default=60)

    add("list", "list registered benchmark functions")

    p = add("surface", "sample a 2-D objective on a lattice")
    p.add_argument("problem")
    p.add_argument("--resolution", type=int, default=200)
    p.add_argument("--printed-griewank", action="store_true")
    p.add_argument("--output", "-o", default=None, help="CSV path (default: stdout)")

    return parser, subparsers


def read_config_file(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc.strerror or exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.lstrip("-").replace("-", "_")] = value
    return values


def _apply_config_file(subparser, path):
    values = read_config_file(path)
    dests = {a.dest: a for a in subparser._actions}
    for key, value in values.items():
        action = dests.get(key)
        if action is None or key in ("help", "config", "problem"):
            raise CliError(f"config file {path}: unknown key {key!r}")
        if isinstance(action, argparse._StoreTrueAction):
            values[key] = value.lower() in ("1", "true", "yes", "on")
        elif isinstance(action, argparse._StoreFalseAction):
            values[key] = value.lower() not in ("1", "true", "yes", "on")
    subparser.set_defaults(**values)


def parse_args(argv):
    parser, subparsers = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        _apply_config_file(subparsers[args.command], args.config)
        args = parser.parse_args(argv)
    return args


def config_from_args(args, seed=None):
    schedule = DerivedEta() if args.schedule == "derived" else LinearEta(args.eta_max, args.eta_min)
    return EpoConfig(
        particles=args.particles,
        iterations=args.iterations,
        l_scale0=args.l_scale,
        res=args.res,
        eta_schedule=schedule,
        scale_offset=args.scale_offset,
        elite_count=args.elite,
        shrink_mode=args.shrink,
        perturb_center=args.center,
        perturb_dist=args.dist,
        seed=seed,
    )


def _base_seed(args):
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise CliError("--seed must be an unsigned 64-bit integer")
        return args.seed
    seed = secrets.randbits(64)
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def _jobs(args):
    return args.jobs if args.jobs is not None else jobs_from_env()


def _check_output(path):
    parent = Path(path).parent if not Path(path).is_dir() else Path(path)
    if not parent.exists():
        raise CliError(f"output directory {parent} does not exist")


def _resolve_output(args, plan):
    if args.output is None:
        return None
    out = Path(args.output)
    if out.is_dir():
        out = out / output_name(plan.problem_name, plan.config, plan.base_seed, args.format)
    _check_output(out)
    return out


def _report(plan, result, out, traces=True):
    s = result.stats
    meta = result.metadata
    print(f"problem {meta['problem']}  dims {meta['dims']}  runs {plan.runs}  base_seed {plan.base_seed}")
    print(f"final y_best  avg {s.y_avg:.6e}  std {s.y_std:.6e}  median {s.y_median:.6e}  best {s.y_min:.6e}")
    shown = min(len(s.x_avg), 10)
    coords = " ".join(f"{v:.6g}" for v in s.x_avg[:shown]) + (" ..." if len(s.x_avg) > shown else "")
    print(f"x_best avg  {coords}")
    print(f"elapsed {s.total_elapsed:.3f} s", file=sys.stderr)
    if out is not None:
        files = export_results(result, out.suffix.lstrip(".") or "csv", out, traces=traces)
        print(f"wrote {files[0]}" + (f" (+{len(files) - 1} trace files)" if len(files) > 1 else ""),
              file=sys.stderr)


def cmd_bench(args):
    plan = ExperimentPlan(args.problem, config_from_args(args), args.runs, _base_seed(args), args.dims,
                          printed_griewank=args.printed_griewank, jobs=_jobs(args))
    out = _resolve_output(args, plan)
    if out is not None and out.suffix not in (".csv", ".json"):
        out = out.with_suffix("." + args.format)
    _report(plan, run_experiment(plan), out, args.traces)


def cmd_constrained(args):
    kwargs = {"penalty_rho": args.penalty_rho, "penalty_beta": args.penalty_beta}
    if args.problem == "three-bar-truss":
        kwargs.update(l=args.truss_l, P=args.truss_p, sigma=args.truss_sigma)
    problem = get_problem(args.problem, **kwargs)
    plan = ExperimentPlan(problem, config_from_args(args), args.runs, _base_seed(args), jobs=_jobs(args))
    out = _resolve_output(args, plan)
    if out is not None and out.suffix not in (".csv", ".json"):
        out = out.with_suffix("." + args.format)
    result = run_experiment(plan)
    _report(plan, result, out, args.traces)
    feasible = sum(problem.is_feasible(r.x_best) for r in result.records)
    best = min(result.records, key=lambda r: r.final_y_best)
    print(f"feasible runs {feasible}/{plan.runs}  best f {best.final_y_best:.10g} at "
          + " ".join(f"{v:.6g}" for v in best.x_best))


def _parse_ranges(text):
    pairs = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        try:
            hi, lo = item.split(":")
            pairs.append((float(hi), float(lo)))
        except ValueError:
            raise CliError(f"bad eta range {item!r}; expected eta_max:eta_min") from None
    return pairs


def cmd_sweep(args):
    ranges = _parse_ranges(args.ranges)
    base_seed = _base_seed(args)
    config = config_from_args(args)
    if args.output:
        _check_output(args.output)
    entries = eta_sweep(args.problem, config, ranges, args.runs, base_seed, args.dims, _jobs(args))
    reference = next((e for e in entries if e.traces is not None and e.eta_max == e.eta_min), None)
    level = None if reference is None else reference.median_trace[-1]
    for e in entries:
        if e.error:
            print(f"{e.label:>16}  skipped: {e.error}")
            continue
        med = e.median_trace
        line = f"{e.label:>16}  median final y_best {med[-1]:.6e}"
        if level is not None and e is not reference:
            hit = first_reach(med, level)
            line += f"  reaches constant-eta final level at t={hit if hit is not None else 'never'}"
        print(line)
    good = [e for e in entries if e.traces is not None]
    if args.output and good:
        with open(args.output, "w", newline="") as fh:
            fh.write(f"# median y_best over {args.runs} runs per schedule, base_seed {base_seed}\n")
            w = csv.writer(fh)
            w.writerow(["t"] + [e.label for e in good])
            cols = [e.median_trace for e in good]
            for t in range(len(cols[0])):
                w.writerow([t] + [repr(float(c[t])) for c in cols])


def cmd_converge(args):
    t_values = [int(s) for s in args.t_values.split(",") if s.strip()]
    config = config_from_args(args).replace(iterations=max(args.iterations, max(t_values)))
    base_seed = _base_seed(args)
    dims = args.dims
    spec = get_spec(args.problem)
    objective = make_objective(args.problem, dims)
    space = SearchSpace.box(objective.dims, *spec.bounds)
    rates = convergence_probability_study(objective, args.delta, t_values, args.trials, config,
                                          base_seed, space)
    print(f"problem {args.problem}  dims {objective.dims}  delta {args.delta}  trials {args.trials}")
    for t, rate in rates.items():
        print(f"t={t:<6d} success rate {rate:.3f}")


def cmd_oracle(args):
    value, tuples = gear_train_exhaustive_oracle(args.low, args.high)
    print(f"optimum {value:.4e} ({value!r})")
    for tup in tuples:
        print(" ".join(str(v) for v in tup))


def cmd_list(args):
    rows = [describe(s) for s in REGISTRY.values()]
    cols = ["name", "dims", "bounds", "f_min", "family", "formula"]
    widths = {c: max(len(c), *(len(r[c]) for r in rows)) for c in cols}
    print("  ".join(c.ljust(widths[c]) for c in cols).rstrip())
    for r in rows:
        print("  ".join(r[c].ljust(widths[c]) for c in cols).rstrip())


def cmd_surface(args):
    objective = make_objective(args.problem, 2, printed_griewank=args.printed_griewank)
    grid = surface_grid(objective, args.resolution)
    if args.output:
        _check_output(args.output)
        write_surface(grid, args.output)
    else:
        w = csv.writer(sys.stdout)
        w.writerow(["x0", "x1", "f"])
        w.writerows([[repr(float(v)) for v in row] for row in grid])


COMMANDS = {
    "bench": cmd_bench,
    "constrained": cmd_constrained,
    "sweep-eta": cmd_sweep,
    "converge-study": cmd_converge,
    "oracle": cmd_oracle,
    "list": cmd_list,
    "surface": cmd_surface,
}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
        COMMANDS[args.command](args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    except (CliError, ConfigError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        print(f"perchopt: error: {msg}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

