"""End-to-end robustness study: optimize, sample, re-rank, report.

Stages: NSGA-II archive at the nominal environment (skipped when an
external archive is supplied) -> small-variation sampling and I_RS ->
scenario re-ranking and I_RL -> robustness plane and its Pareto subset ->
CSV/JSON artifacts and figures in the output directory.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .core import ModelError, NoiseSpec, ProblemDef, evaluate_batch
from .nsga2 import GAConfig, ParetoArchive, optimize
from .problems import default_polar, load_polar, numerical_problem, numerical_scenarios
from .problems import wind_scenarios, wind_turbine_problem
from .robustness import RobustnessError, RobustnessRecord, ScenarioSet, assess, bin_normal, robust_pareto_filter

log = logging.getLogger(__name__)

PARETO_CSV = "pareto.csv"
ROBUSTNESS_CSV = "robustness.csv"
RFSPACE_CSV = "rfspace.csv"
SCENARIO_CSV = "scenario_fronts.csv"
SUMMARY_JSON = "summary.json"
PF_FIGURE = "scenario_fronts.png"
RF_FIGURE = "rfspace.png"

INITIAL_ID = "initial"


class ConfigError(ModelError):
    pass


def fmt(v) -> str:
    """17 significant digits: floats survive a text round trip unchanged."""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


@dataclass(frozen=True)
class RunConfig:
    problem: ProblemDef
    scenarios: ScenarioSet
    ga: GAConfig = GAConfig()
    samples: int = 1000
    seed: int = 0
    threads: int = 1
    out: Path = Path("results")
    include_infeasible: bool = True
    include_initial: bool = False
    weights: Optional[tuple[float, ...]] = None
    figures: bool = True
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.samples < 2:
            raise ConfigError("samples must be >= 2")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if len(self.scenarios.points[0]) != self.problem.r:
            raise ConfigError(
                f"scenario vectors have {len(self.scenarios.points[0])} entries, "
                f"problem has r={self.problem.r} environment parameters"
            )
        if self.weights is not None and len(self.weights) != self.problem.m:
            raise ConfigError("one I_RS weight per objective required")


@dataclass
class RunReport:
    problem: str
    ids: list
    records: list[RobustnessRecord]
    robust_ids: list
    out: Path
    files: dict
    timings: dict

    def record(self, sid) -> RobustnessRecord:
        return next(r for r in self.records if r.id == sid)


# ---------------------------------------------------------------- config


def _build_problem(cfg: dict, base: Path) -> ProblemDef:
    name = cfg.get("problem")
    opts = cfg.get("problem_options", {}) or {}
    if name == "numerical_eg1":
        problem = numerical_problem()
    elif name == "bemt_rotor":
        polar_path = opts.get("polar")
        polar = load_polar(base / polar_path) if polar_path else default_polar()
        problem = wind_turbine_problem(polar, n_elements=int(opts.get("n_elements", 40)))
    else:
        raise ConfigError(f"unknown problem {name!r}; expected 'numerical_eg1' or 'bemt_rotor'")

    updates: dict[str, Any] = {}
    if "dv_bounds" in cfg:
        updates["dv_bounds"] = tuple(tuple(float(v) for v in b) for b in cfg["dv_bounds"])
    if "dep_nominal" in cfg:
        updates["dep_nominal"] = tuple(float(v) for v in cfg["dep_nominal"])
    if "dv_noise" in cfg:
        updates["dv_noise"] = tuple(NoiseSpec.from_dict(d) for d in cfg["dv_noise"])
    if "dep_noise" in cfg:
        updates["dep_noise"] = tuple(NoiseSpec.from_dict(d) for d in cfg["dep_noise"])
    if updates:
        problem = replace(problem, **updates)

    counts = cfg.get("counts", {}) or {}
    for key in ("n", "m", "q", "r"):
        if key in counts and int(counts[key]) != getattr(problem, key):
            raise ConfigError(f"counts.{key}={counts[key]} but {name} has {key}={getattr(problem, key)}")
    return problem


def _build_scenarios(spec: Optional[dict], problem: ProblemDef) -> ScenarioSet:
    if spec is None:
        return numerical_scenarios() if problem.name == "numerical_eg1" else wind_scenarios(problem)
    if "bin_normal" in spec:
        b = spec["bin_normal"]
        centres, h = bin_normal(b["mean"], b["std"], b["lo"], b["hi"], b.get("width", 1.0),
                                b.get("method", "density"))
        return ScenarioSet.vary(problem, b["parameter"], centres.tolist(), h.tolist())
    if "parameter" in spec:
        return ScenarioSet.vary(problem, spec["parameter"], spec["values"], spec["probabilities"])
    if "points" in spec:
        return ScenarioSet(tuple(tuple(p) for p in spec["points"]), tuple(spec["probabilities"]))
    raise ConfigError("scenarios need one of 'bin_normal', 'parameter' or 'points'")


def config_from_dict(cfg: dict, base: Path = Path("."), **overrides) -> RunConfig:
    """Build and validate a :class:`RunConfig`; ``overrides`` win over ``cfg``."""
    cfg = {**cfg, **{k: v for k, v in overrides.items() if v is not None}}
    try:
        problem = _build_problem(cfg, base)
        scenarios = _build_scenarios(cfg.get("scenarios"), problem)
        seed = int(cfg.get("seed", 0))
        ga_dict = dict(cfg.get("ga", {}) or {})
        if overrides.get("seed") is not None or "seed" not in ga_dict:
            ga_dict["seed"] = seed
        ga = GAConfig.from_dict(ga_dict)
        weights = cfg.get("weights")
        out = Path(cfg.get("out", "results"))
        return RunConfig(
            problem=problem,
            scenarios=scenarios,
            ga=ga,
            samples=int(cfg.get("samples", 1000)),
            seed=seed,
            threads=int(cfg.get("threads", 1)),
            out=out,
            include_infeasible=bool(cfg.get("include_infeasible", True)),
            include_initial=bool(cfg.get("include_initial", False)),
            weights=tuple(float(w) for w in weights) if weights is not None else None,
            figures=bool(cfg.get("figures", True)),
            raw=cfg,
        )
    except ConfigError:
        raise
    except (RobustnessError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
    except ModelError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path, **overrides) -> RunConfig:
    path = Path(path)
    try:
        cfg = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("configuration must be a JSON object")
    return config_from_dict(cfg, base=path.parent, **overrides)


# ---------------------------------------------------------------- archive IO


def write_csv(path: Path, header: list[str], rows) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def read_archive(path, problem: ProblemDef) -> tuple[list, np.ndarray]:
    """Ids and design vectors from a CSV with an ``id`` column and one column
    per design variable (named ``x_<name>`` or ``<name>``)."""
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            rows = list(reader)
            header = reader.fieldnames or []
    except OSError as exc:
        raise ConfigError(f"cannot read archive {path}: {exc}") from exc
    if not rows:
        raise ConfigError("empty-archive: the archive contains no solutions")
    cols = []
    for name in problem.dv_names:
        col = f"x_{name}" if f"x_{name}" in header else name if name in header else None
        if col is None:
            raise ConfigError(f"schema mismatch: archive lacks a column for design variable {name!r}")
        cols.append(col)
    if "id" not in header:
        raise ConfigError("schema mismatch: archive lacks an 'id' column")
    ids = [r["id"] for r in rows]
    if len(set(ids)) != len(ids):
        raise ConfigError("schema mismatch: duplicate solution ids")
    try:
        X = np.array([[float(r[c]) for c in cols] for r in rows])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"schema mismatch: {exc}") from exc
    return ids, X


def _archive_rows(problem: ProblemDef, ids, X):
    ev = evaluate_batch(problem, X, np.asarray(problem.dep_nominal))
    for i, sid in enumerate(ids):
        yield [sid, *X[i], *ev.F[i], *ev.G[i]]


# ---------------------------------------------------------------- stages


def _write_outputs(config: RunConfig, ids, X, records, scen_evals, timings) -> dict:
    problem, scenarios, out = config.problem, config.scenarios, config.out
    out.mkdir(parents=True, exist_ok=True)
    files = {}
    xs = [f"x_{n}" for n in problem.dv_names]
    fs = [f"f_{n}" for n in problem.objective_names]
    gs = [f"g_{n}" for n in problem.constraint_names]
    N = len(scenarios)

    files["pareto"] = write_csv(out / PARETO_CSV, ["id", *xs, *fs, *gs], _archive_rows(problem, ids, X))

    header = ["id", *xs, *[f"f0_{n}" for n in problem.objective_names], "I_RS", "I_F",
              *[f"I_P_{j + 1}" for j in range(N)], "I_RL",
              *[f"dfS_{n}" for n in problem.objective_names], *[f"dfL_{n}" for n in problem.objective_names]]
    files["robustness"] = write_csv(out / ROBUSTNESS_CSV, header, (
        [r.id, *r.x, *r.f0, r.i_rs, r.i_f, *r.i_p, r.i_rl, *r.df_small, *r.df_large] for r in records))

    robust = robust_pareto_filter({r.id: r.rf_point for r in records})
    files["rfspace"] = write_csv(out / RFSPACE_CSV, ["id", "I_RS", "I_RL", "robust_pareto"],
                                 ([r.id, r.i_rs, r.i_rl, int(r.id in robust)] for r in records))

    def scen_rows():
        for j, (p, h) in enumerate(zip(scenarios.points, scenarios.probabilities)):
            ev = scen_evals[j]
            for i, r in enumerate(records):
                yield [j + 1, *p, h, r.id, *ev.F[i], *ev.G[i],
                       int(ev.ok[i] and bool(np.all(ev.G[i] <= 0))), r.ranks[j], ev.codes[i] or "ok"]

    files["scenario_fronts"] = write_csv(
        out / SCENARIO_CSV,
        ["scenario", *problem.dep_names, "h", "id", *fs, *gs, "feasible", "rank", "status"],
        scen_rows())

    robust_ids = [r.id for r in records if r.id in robust]
    summary = {
        "problem": problem.name,
        "n_solutions": len(records),
        "n_scenarios": N,
        "initial_scenario": scenarios.initial_index + 1,
        "samples": config.samples,
        "seed": config.seed,
        "include_infeasible": config.include_infeasible,
        "robust_pareto": robust_ids,
        "n_feasible_everywhere": sum(r.i_f for r in records),
        "n_infeasible_somewhere": sum(1 - r.i_f for r in records),
        "n_failed_samples": sum(r.n_failed_samples for r in records),
        "i_rs_unavailable": [r.id for r in records if not math.isfinite(r.i_rs)],
        "timings": timings,
    }
    files["summary"] = out / SUMMARY_JSON
    files["summary"].write_text(json.dumps(summary, indent=2) + "\n")

    if config.figures:
        files.update(render_figures(config, records, scen_evals, robust))
    return files


def render_figures(config: RunConfig, records, scen_evals, robust) -> dict:
    from .plotting import plot_rf_space, plot_scenario_fronts

    problem, scenarios, out = config.problem, config.scenarios, config.out
    varying = [k for k in range(problem.r) if len({p[k] for p in scenarios.points}) > 1] or [0]
    labels = [
        ", ".join(f"{problem.dep_names[k]}={p[k]:g}" for k in varying) + f"  (h={h:g})"
        for p, h in zip(scenarios.points, scenarios.probabilities)
    ]
    ranks = np.array([r.ranks for r in records])
    feasible = np.column_stack([ev.ok & np.all(ev.G <= 0, axis=1) for ev in scen_evals])
    files = {
        "scenario_figure": plot_scenario_fronts(out / PF_FIGURE, problem.objective_names, labels,
                                                [ev.F for ev in scen_evals], feasible, ranks),
        "rf_figure": plot_rf_space(out / RF_FIGURE, [r.id for r in records], [r.i_rs for r in records],
                                   [r.i_rl for r in records], robust),
    }
    return files


def _robustness_stage(config: RunConfig, ids, X, timings) -> RunReport:
    t0 = time.perf_counter()
    records, scen_evals = assess(
        config.problem, X, ids, config.scenarios, n_samples=config.samples, seed=config.seed,
        threads=config.threads, weights=config.weights, include_infeasible=config.include_infeasible,
    )
    timings["robustness_s"] = round(time.perf_counter() - t0, 3)
    t0 = time.perf_counter()
    files = _write_outputs(config, ids, X, records, scen_evals, timings)
    timings["report_s"] = round(time.perf_counter() - t0, 3)
    robust = robust_pareto_filter({r.id: r.rf_point for r in records})
    return RunReport(config.problem.name, list(ids), records, [r.id for r in records if r.id in robust],
                     config.out, files, timings)


def _with_initial(config: RunConfig, ids: list, X: np.ndarray):
    if not config.include_initial:
        return ids, X
    if config.problem.dv_nominal is None:
        raise ConfigError(f"{config.problem.name} has no initial design to include")
    return [*ids, INITIAL_ID], np.vstack([X, np.asarray(config.problem.dv_nominal)[None, :]])


def run_pipeline(config: RunConfig) -> RunReport:
    """Optimize, then assess robustness of the resulting archive."""
    timings = {}
    t0 = time.perf_counter()
    archive: ParetoArchive = optimize(config.problem, config.ga)
    timings["optimize_s"] = round(time.perf_counter() - t0, 3)
    log.info("archive: %d solutions after %d generations", len(archive), archive.generations_run)
    ids, X = _with_initial(config, list(archive.ids), archive.X)
    return _robustness_stage(config, ids, X, timings)


def analyze_archive(archive_path, config: RunConfig) -> RunReport:
    """Robustness stages only, on a user-supplied archive."""
    ids, X = read_archive(archive_path, config.problem)
    ids, X = _with_initial(config, ids, X)
    return _robustness_stage(config, ids, X, {})


def analyze_designs(ids, X, config: RunConfig) -> RunReport:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] == 0:
        raise ConfigError("empty-archive: the archive contains no solutions")
    return _robustness_stage(config, list(ids), X, {})


def rederive_summary(out) -> dict:
    """Recompute the robust-Pareto subset from ``rfspace.csv`` and refresh
    ``summary.json`` (and the marker column) in place."""
    out = Path(out)
    path = out / RFSPACE_CSV
    if not path.exists():
        raise ConfigError(f"{path} not found")
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    points = {r["id"]: (float(r["I_RS"]), float(r["I_RL"])) for r in rows}
    robust = robust_pareto_filter(points)
    write_csv(path, ["id", "I_RS", "I_RL", "robust_pareto"],
              ([r["id"], float(r["I_RS"]), float(r["I_RL"]), int(r["id"] in robust)] for r in rows))
    summary_path = out / SUMMARY_JSON
    summary = json.loads(summary_path.read_text()) if summary_path.exists() else {}
    summary["robust_pareto"] = [r["id"] for r in rows if r["id"] in robust]
    summary["n_solutions"] = len(rows)
    summary_path.write_text(json.dumps(summary, indent=2) + "\n")

    from .plotting import plot_rf_space

    plot_rf_space(out / RF_FIGURE, list(points), [p[0] for p in points.values()],
                  [p[1] for p in points.values()], robust)
    return summary
