"""Seeded multi-run experiments, eta sweeps, convergence study and export."""
from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .constrained import ConstrainedProblem, solve
from .core import ConfigError, DerivedEta, EpoConfig, LinearEta, iterate, run
from .objectives import get_spec, known_optimum, make_objective

__all__ = [
    "ExperimentPlan",
    "ExperimentResult",
    "ExperimentStats",
    "RunRecord",
    "SweepEntry",
    "convergence_probability_study",
    "derive_seed",
    "eta_sweep",
    "export_results",
    "first_reach",
    "jobs_from_env",
    "load_results",
    "load_trace",
    "output_name",
    "run_experiment",
    "surface_grid",
    "variant_name",
    "write_surface",
]

MASK64 = (1 << 64) - 1
STD_CONVENTION = "population (divisor N)"
RUN_COLUMNS_HEAD = ("run_id", "seed", "final_y_best")
RUN_COLUMNS_TAIL = ("evaluations", "elapsed_s")
TRACE_COLUMNS = ("t", "y_best", "l_scale")


def derive_seed(base_seed, index):
    """SplitMix64 output for stream position ``index`` of ``base_seed``.

    The increment is odd and the finalizer is a bijection on 64-bit words, so
    seeds are distinct for every index below 2**64.
    """
    z = (int(base_seed) + (int(index) + 1) * 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


@dataclass
class ExperimentPlan:
    """What to run: a registered benchmark name or a constrained problem."""

    problem: Union[str, ConstrainedProblem]
    config: EpoConfig = field(default_factory=EpoConfig)
    runs: int = 30
    base_seed: int = 0
    dims: int | None = None
    printed_griewank: bool = False
    jobs: int = 1

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if not 0 <= int(self.base_seed) < 2**64:
            raise ConfigError("base_seed must be an unsigned 64-bit integer")
        if isinstance(self.problem, str):
            spec = get_spec(self.problem)
            spec.check_dims(spec.default_dims if self.dims is None else self.dims)
        self.config.validate()

    @property
    def problem_name(self):
        return self.problem if isinstance(self.problem, str) else self.problem.name

    def seeds(self):
        return [derive_seed(self.base_seed, i) for i in range(self.runs)]

    def metadata(self):
        meta = {
            "problem": self.problem_name,
            "runs": self.runs,
            "base_seed": self.base_seed,
            "config": self.config.to_dict(),
        }
        if isinstance(self.problem, str):
            meta["dims"] = get_spec(self.problem).default_dims if self.dims is None else self.dims
            if self.printed_griewank:
                meta["printed_griewank"] = True
        else:
            meta["dims"] = self.problem.space.dims
            meta["penalty_rho"] = self.problem.penalty_rho
            meta["penalty_beta"] = self.problem.penalty_beta
        return meta


@dataclass(eq=False)
class RunRecord:
    run_id: int
    seed: int
    final_y_best: float
    x_best: np.ndarray
    evaluations: int
    elapsed_s: float
    trace: np.ndarray | None = None


@dataclass(eq=False)
class ExperimentStats:
    x_avg: np.ndarray
    x_std: np.ndarray
    y_avg: float
    y_std: float
    y_median: float
    y_min: float
    elapsed: np.ndarray
    total_elapsed: float
    seeds: list

    @classmethod
    def from_records(cls, records):
        if not records:
            empty = np.array([])
            return cls(empty, empty, math.nan, math.nan, math.nan, math.nan, empty, 0.0, [])
        X = np.array([r.x_best for r in records], dtype=np.float64)
        y = np.array([r.final_y_best for r in records], dtype=np.float64)
        elapsed = np.array([r.elapsed_s for r in records], dtype=np.float64)
        return cls(
            x_avg=X.mean(axis=0),
            x_std=X.std(axis=0),
            y_avg=float(y.mean()),
            y_std=float(y.std()),
            y_median=float(np.median(y)),
            y_min=float(y.min()),
            elapsed=elapsed,
            total_elapsed=float(elapsed.sum()),
            seeds=[r.seed for r in records],
        )

    def to_dict(self):
        return {
            "x_avg": self.x_avg.tolist(),
            "x_std": self.x_std.tolist(),
            "y_avg": self.y_avg,
            "y_std": self.y_std,
            "y_median": self.y_median,
            "y_min": self.y_min,
            "elapsed": self.elapsed.tolist(),
            "total_elapsed": self.total_elapsed,
            "seeds": list(self.seeds),
        }

    def outcome(self):
        """The seed-determined part of :meth:`to_dict` (everything except wall-clock timing)."""
        d = self.to_dict()
        del d["elapsed"], d["total_elapsed"]
        return d

    def __eq__(self, other):
        # timing varies between otherwise identical experiments, so it is not compared
        if not isinstance(other, ExperimentStats):
            return NotImplemented
        return _same(self.outcome(), other.outcome())


def _same(a, b):
    # bitwise comparison that treats nan == nan
    return json.dumps(a, allow_nan=True) == json.dumps(b, allow_nan=True)


@dataclass(eq=False)
class ExperimentResult:
    metadata: dict
    stats: ExperimentStats
    records: list


def _objective_for(plan):
    return make_objective(plan.problem, plan.dims, printed_griewank=plan.printed_griewank)


def _single_run(plan, run_id, seed):
    config = plan.config.replace(seed=seed)
    if isinstance(plan.problem, ConstrainedProblem):
        result = solve(plan.problem, config).as_run_result()
    else:
        objective = _objective_for(plan)
        result = run(config, objective.space, objective)
    return RunRecord(run_id, seed, result.best.y_best, result.best.x_best,
                     result.evaluations, result.elapsed, result.trace)


def _star_run(args):
    return _single_run(*args)


def run_experiment(plan):
    """Run ``plan.runs`` independent seeded runs and aggregate them.

    Runs may execute in worker processes (``plan.jobs > 1``); records are
    gathered in run order so the output does not depend on ``jobs``.
    """
    seeds = plan.seeds()
    if len(set(seeds)) != len(seeds):
        raise AssertionError("derived run seeds collide")
    tasks = [(plan, i, s) for i, s in enumerate(seeds)]
    jobs = plan.jobs
    if jobs > 1 and plan.runs > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, plan.runs)) as pool:
            records = list(pool.map(_star_run, tasks))
    else:
        records = [_single_run(*t) for t in tasks]
    return ExperimentResult(plan.metadata(), ExperimentStats.from_records(records), records)


@dataclass(eq=False)
class SweepEntry:
    eta_max: float
    eta_min: float
    traces: np.ndarray | None = None  # (runs, iterations + 1) y_best per run
    error: str | None = None

    @property
    def median_trace(self):
        return None if self.traces is None else np.median(self.traces, axis=0)

    @property
    def label(self):
        if self.eta_max == self.eta_min:
            return f"constant {self.eta_max:g}"
        return f"{self.eta_max:g}->{self.eta_min:g}"


def eta_sweep(problem, config, ranges, runs=1, base_seed=0, dims=None, jobs=1):
    """Run one experiment per ``(eta_max, eta_min)`` pair and keep the y_best traces.

    Every pair uses the same run seeds so the schedules see identical initial
    swarms. An invalid pair yields an entry carrying ``error``; the others run.
    """
    entries = []
    for eta_max, eta_min in ranges:
        try:
            schedule = LinearEta(float(eta_max), float(eta_min))
        except ConfigError as exc:
            entries.append(SweepEntry(eta_max, eta_min, error=str(exc)))
            continue
        plan = ExperimentPlan(problem, config.replace(eta_schedule=schedule), runs, base_seed, dims, jobs=jobs)
        result = run_experiment(plan)
        traces = np.array([r.trace[:, 1] for r in result.records])
        entries.append(SweepEntry(float(eta_max), float(eta_min), traces))
    return entries


def first_reach(trace, level):
    """First iteration at which ``trace`` is at or below ``level`` (None if never)."""
    hits = np.flatnonzero(np.asarray(trace) <= level)
    return int(hits[0]) if hits.size else None


STUDY_CONFIG = EpoConfig(eta_schedule=DerivedEta())


def convergence_probability_study(objective, delta, t_values, trials=100, config=None,
                                  base_seed=0, space=None, minimizer=None):
    """Fraction of seeded runs whose incumbent is within ``delta`` (max-norm) of the optimum.

    Each trial runs once over the configured horizon (``config.iterations``);
    the rate at ``t`` is read from the incumbent after ``t`` iterations, which
    is exactly what a run truncated at ``t`` would report. ``t = 0`` is the
    initial evaluation alone. The default configuration is the constant-eta
    variant derived from ``res`` (:data:`STUDY_CONFIG`).
    """
    if not delta > 0:
        raise ConfigError("delta must be positive")
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    config = STUDY_CONFIG if config is None else config
    t_values = [int(t) for t in t_values]
    if not t_values or any(b <= a for a, b in zip(t_values, t_values[1:])) or t_values[0] < 0:
        raise ConfigError("t_values must be non-negative and strictly increasing")
    if t_values[-1] > config.iterations:
        raise ConfigError(f"t_values exceed the run horizon ({config.iterations} iterations)")
    if isinstance(objective, str):
        objective = make_objective(objective, None if space is None else space.dims)
    if space is None:
        space = objective.space
    if minimizer is None:
        name = getattr(objective, "name", None)
        if name is None:
            raise ConfigError("objective has no registered minimizer; pass minimizer=")
        _, minimizer = known_optimum(name, space.dims)
        if minimizer is None:
            raise ConfigError(f"{name} has no known minimizer")
    minimizer = np.asarray(minimizer, dtype=np.float64)
    horizon = t_values[-1]
    checkpoints = set(t_values)
    hits = dict.fromkeys(t_values, 0)
    for trial in range(trials):
        cfg = config.replace(seed=derive_seed(base_seed, trial))
        for state, best in iterate(cfg, space, objective):
            if state.t in checkpoints and np.max(np.abs(best.x_best - minimizer)) <= delta:
                hits[state.t] += 1
            if state.t >= horizon:
                break
    return {t: hits[t] / trials for t in t_values}


def surface_grid(objective, resolution, space=None):
    """Sample a 2-D objective on a ``resolution x resolution`` lattice spanning its box.

    Returns an array of rows ``(x0, x1, f)``, x1 varying fastest.
    """
    if isinstance(objective, str):
        objective = make_objective(objective, 2)
    if space is None:
        space = objective.space
    if space.dims != 2:
        raise ConfigError("surface grids need a 2-D objective")
    if int(resolution) != resolution or resolution < 2:
        raise ConfigError("resolution must be an integer >= 2")
    frac = np.arange(resolution) / (resolution - 1)
    axes = [space.lower[j] + (space.upper[j] - space.lower[j]) * frac for j in range(2)]
    g0, g1 = np.meshgrid(axes[0], axes[1], indexing="ij")
    pts = np.column_stack([g0.ravel(), g1.ravel()])
    batch = getattr(objective, "evaluate_batch", None)
    f = batch(pts) if batch is not None else np.array([objective(p) for p in pts])
    return np.column_stack([pts, f])


def write_surface(grid, path):
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x0", "x1", "f"])
            writer.writerows([[repr(float(v)) for v in row] for row in grid])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def variant_name(config):
    name = "mod" if isinstance(config.eta_schedule, LinearEta) else "epo"
    if config.elite_count:
        name += f"-avg{config.elite_count}"
    return name


def output_name(problem_name, config, base_seed, fmt="csv"):
    return f"{problem_name}_{variant_name(config)}_{base_seed}.{fmt}"


def _run_header(dims):
    return list(RUN_COLUMNS_HEAD) + [f"x_best_{j}" for j in range(dims)] + list(RUN_COLUMNS_TAIL)


def _fmt(v):
    return repr(float(v))


def export_results(result, fmt, path, traces=True):
    """Write run records as CSV or JSON; returns the list of files written.

    CSV writes one row per run plus, with ``traces``, a ``<stem>_trace_<id>.csv``
    per run. Both formats start with the experiment metadata and record the
    standard-deviation convention. Floats are written with round-trip precision.
    """
    path = Path(path)
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}; use csv or json")
    meta = dict(result.metadata)
    dims = int(meta.get("dims") or (len(result.records[0].x_best) if result.records else 0))
    written = []
    try:
        if fmt == "json":
            doc = {
                "metadata": meta,
                "std_convention": STD_CONVENTION,
                "runs": [
                    {
                        "run_id": r.run_id,
                        "seed": r.seed,
                        "final_y_best": float(r.final_y_best),
                        "x_best": [float(v) for v in r.x_best],
                        "evaluations": int(r.evaluations),
                        "elapsed_s": float(r.elapsed_s),
                        "trace": None if r.trace is None else r.trace.tolist(),
                    }
                    for r in result.records
                ],
                "stats": result.stats.to_dict(),
            }
            path.write_text(json.dumps(doc, indent=1))
            written.append(path)
        else:
            with path.open("w", newline="") as fh:
                fh.write(f"# config: {json.dumps(meta, sort_keys=True)}\n")
                fh.write(f"# std: {STD_CONVENTION}\n")
                writer = csv.writer(fh)
                writer.writerow(_run_header(dims))
                for r in result.records:
                    writer.writerow([r.run_id, r.seed, _fmt(r.final_y_best)]
                                    + [_fmt(v) for v in r.x_best]
                                    + [int(r.evaluations), _fmt(r.elapsed_s)])
            written.append(path)
            if traces:
                for r in result.records:
                    if r.trace is None:
                        continue
                    tpath = path.with_name(f"{path.stem}_trace_{r.run_id}.csv")
                    with tpath.open("w", newline="") as fh:
                        fh.write(f"# run_id: {r.run_id} seed: {r.seed}\n")
                        writer = csv.writer(fh)
                        writer.writerow(TRACE_COLUMNS)
                        for t, y, l in r.trace:
                            writer.writerow([int(t), _fmt(y), _fmt(l)])
                    written.append(tpath)
    except OSError as exc:
        raise OSError(f"cannot write {exc.filename or path}: {exc.strerror or exc}") from exc
    return written


def load_results(path):
    """Read back a file written by :func:`export_results` and re-aggregate it."""
    path = Path(path)
    if path.suffix == ".json":
        doc = json.loads(path.read_text())
        records = [
            RunRecord(r["run_id"], r["seed"], float(r["final_y_best"]),
                      np.array(r["x_best"], dtype=np.float64), r["evaluations"], float(r["elapsed_s"]),
                      None if r.get("trace") is None else np.array(r["trace"], dtype=np.float64))
            for r in doc["runs"]
        ]
        meta = doc["metadata"]
    else:
        meta = {}
        with path.open(newline="") as fh:
            lines = fh.read().splitlines()
        body = []
        for line in lines:
            if line.startswith("# config: "):
                meta = json.loads(line[len("# config: "):])
            elif not line.startswith("#"):
                body.append(line)
        rows = list(csv.reader(body))
        header, rows = rows[0], rows[1:]
        xcols = [i for i, h in enumerate(header) if h.startswith("x_best_")]
        records = []
        for row in rows:
            records.append(RunRecord(
                int(row[0]), int(row[1]), float(row[2]),
                np.array([float(row[i]) for i in xcols], dtype=np.float64),
                int(row[header.index("evaluations")]), float(row[header.index("elapsed_s")]),
            ))
    return ExperimentResult(meta, ExperimentStats.from_records(records), records)


def load_trace(path):
    """Read a ``<stem>_trace_<id>.csv`` file into an array of ``(t, y_best, l_scale)``."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#"))]
    return np.array([[float(v) for v in r] for r in rows[1:]], dtype=np.float64)


def jobs_from_env(default=1):
    value = os.environ.get("PERCHOPT_JOBS")
    if not value:
        return default
    try:
        jobs = int(value)
    except ValueError:
        raise ConfigError(f"PERCHOPT_JOBS must be a positive integer, got {value!r}") from None
    if jobs < 1:
        raise ConfigError(f"PERCHOPT_JOBS must be a positive integer, got {value!r}")
    return jobs

