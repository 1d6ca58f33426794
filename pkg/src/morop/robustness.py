"""Robustness indices for alternative Pareto-optimal solutions.

Two indices place each solution in a two-dimensional robustness space:

* ``I_RS`` measures how far the objectives spread under small noise in the
  design variables and environment parameters (normalized sample standard
  deviation plus mean shift, combined over objectives in quadrature).
* ``I_RL`` measures how well a solution keeps a good Pareto ranking among
  the alternatives when the environment takes each of ``N`` discrete values
  with probability ``h_j``.  A solution that is infeasible in any scenario
  gets ``I_RL = 1``; one that stays non-dominated everywhere gets ``0``.

Both are "smaller is better".  The robust-Pareto subset is the
non-dominated set of the (I_RS, I_RL) points.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Hashable, Optional, Sequence

import numpy as np

from .core import BatchEvaluation, Evaluation, ModelError, ModelFailure, ProblemDef, evaluate_batch, feasible_rows
from .pareto import ObjectivePoint, dominator_counts, pareto_front
from .sampling import apply_noise, derived_seed, lhs

log = logging.getLogger(__name__)

PROBABILITY_TOL = 1e-9


class RobustnessError(ModelError):
    pass


class ZeroRangeError(RobustnessError):
    """An objective has identical extremes on the front; I_RS is undefined."""


@dataclass(frozen=True)
class ScenarioSet:
    """Discrete environments ``p_1..p_N`` with probabilities ``h_j``.

    The initial environment ``p_0`` is the most probable one (first on ties).
    """

    points: tuple[tuple[float, ...], ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        pts = tuple(tuple(float(v) for v in p) for p in self.points)
        h = tuple(float(v) for v in self.probabilities)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "probabilities", h)
        if not pts:
            raise RobustnessError("scenario set is empty")
        if len(pts) != len(h):
            raise RobustnessError(f"{len(pts)} scenarios but {len(h)} probabilities")
        if len({len(p) for p in pts}) != 1:
            raise RobustnessError("scenario vectors have differing lengths")
        if any(not math.isfinite(v) or v < 0.0 for v in h):
            raise RobustnessError("scenario probabilities must be finite and >= 0")
        total = math.fsum(h)
        if abs(total - 1.0) > PROBABILITY_TOL:
            raise RobustnessError(f"scenario probabilities sum to {total!r}, not 1")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def initial_index(self) -> int:
        return int(np.argmax(self.probabilities))

    @property
    def initial(self) -> tuple[float, ...]:
        return self.points[self.initial_index]

    @property
    def array(self) -> np.ndarray:
        return np.array(self.points, dtype=float)

    @classmethod
    def vary(cls, problem: ProblemDef, parameter: str, values: Sequence[float],
             probabilities: Sequence[float]) -> "ScenarioSet":
        """Scenarios that differ from the nominal environment in one parameter."""
        j = problem.dep_index(parameter)
        pts = []
        for v in values:
            p = list(problem.dep_nominal)
            p[j] = float(v)
            pts.append(tuple(p))
        return cls(tuple(pts), tuple(probabilities))


def bin_normal(mean: float, std: float, lo: float, hi: float, width: float = 1.0,
               method: str = "density") -> tuple[np.ndarray, np.ndarray]:
    """Discretize a normal distribution onto equal-width cells centred lo..hi.

    ``method="density"`` weights each cell centre by the normal density and
    renormalizes over the grid; ``method="mass"`` uses the probability mass
    of each cell instead.  Returns (centres, probabilities).
    """
    if std <= 0 or width <= 0 or hi < lo:
        raise RobustnessError("bin_normal needs std > 0, width > 0 and hi >= lo")
    count = int(round((hi - lo) / width)) + 1
    centres = lo + width * np.arange(count)
    if abs(centres[-1] - hi) > 1e-9 * max(1.0, abs(hi)):
        raise RobustnessError("(hi - lo) must be a whole number of cell widths")
    if method == "density":
        w = np.exp(-0.5 * ((centres - mean) / std) ** 2)
    elif method == "mass":
        cdf = lambda v: 0.5 * math.erfc(-(v - mean) / (std * math.sqrt(2.0)))  # noqa: E731
        w = np.array([cdf(c + width / 2) - cdf(c - width / 2) for c in centres])
    else:
        raise RobustnessError(f"unknown binning method {method!r}")
    return centres, w / math.fsum(w)


@dataclass(frozen=True)
class ObjectiveExtremes:
    fmax: tuple[float, ...]
    fmin: tuple[float, ...]

    def __post_init__(self):
        if len(self.fmax) != len(self.fmin):
            raise RobustnessError("extremes have differing lengths")
        if any(a < b for a, b in zip(self.fmax, self.fmin)):
            raise RobustnessError("objective maximum below minimum")

    @classmethod
    def from_front(cls, F) -> "ObjectiveExtremes":
        F = np.atleast_2d(np.asarray(F, dtype=float))
        if F.shape[0] == 0:
            raise RobustnessError("cannot take extremes of an empty front")
        return cls(tuple(F.max(axis=0).tolist()), tuple(F.min(axis=0).tolist()))

    @property
    def span(self) -> np.ndarray:
        return np.asarray(self.fmax) - np.asarray(self.fmin)


@dataclass(frozen=True)
class SmallVariationStats:
    sigma: np.ndarray
    mu: np.ndarray
    f0: np.ndarray


@dataclass
class RobustnessRecord:
    id: Hashable
    x: tuple[float, ...]
    f0: tuple[float, ...]
    i_rs: float
    i_f: int
    i_p: tuple[float, ...]
    ranks: tuple[int, ...]
    i_rl: float
    sigma_f: tuple[float, ...] = ()
    mu_f: tuple[float, ...] = ()
    df_small: tuple[float, ...] = ()
    df_large: tuple[float, ...] = ()
    n_failed_samples: int = 0
    notes: list = field(default_factory=list)

    @property
    def rf_point(self) -> tuple[float, float]:
        return (self.i_rs, self.i_rl)


def _objective_array(evals) -> np.ndarray:
    if isinstance(evals, np.ndarray):
        return np.atleast_2d(evals.astype(float))
    if isinstance(evals, BatchEvaluation):
        return evals.F[evals.ok]
    rows = [e.f if isinstance(e, Evaluation) else e for e in evals
            if not isinstance(e, Evaluation) or e.ok]
    return np.atleast_2d(np.array(rows, dtype=float))


def _nominal_vector(nominal) -> np.ndarray:
    if isinstance(nominal, Evaluation):
        if not nominal.ok:
            raise RobustnessError("nominal evaluation failed")
        return np.array(nominal.f, dtype=float)
    return np.asarray(nominal, dtype=float)


def i_rs(sample_evals, nominal, extremes: ObjectiveExtremes,
         weights: Optional[Sequence[float]] = None) -> tuple[float, SmallVariationStats]:
    """Small-variation robustness index.

    Per objective ``i`` the spread is ``sigma_i + |mu_i - f_i0|`` with the
    sample standard deviation (divisor n - 1) and the sample mean, divided by
    the objective's range over the nominal front.  The per-objective terms
    (optionally weighted, default weight 1) are combined as a Euclidean norm.
    """
    F = _objective_array(sample_evals)
    f0 = _nominal_vector(nominal)
    if F.shape[0] < 2:
        raise RobustnessError("I_RS needs at least two successful samples")
    if F.shape[1] != f0.shape[0] or len(extremes.fmax) != f0.shape[0]:
        raise RobustnessError("objective count mismatch between samples, nominal and extremes")
    span = extremes.span
    if np.any(span <= 0.0):
        bad = [i for i, s in enumerate(span) if s <= 0.0]
        raise ZeroRangeError(f"zero-range objective(s) {bad} on the nominal front")
    sigma = F.std(axis=0, ddof=1)
    mu = F.mean(axis=0)
    terms = (sigma + np.abs(mu - f0)) / span
    if weights is not None:
        w = np.asarray(weights, dtype=float)
        if w.shape != terms.shape:
            raise RobustnessError("one weight per objective required")
        terms = terms * w
    return float(math.sqrt(math.fsum(terms**2))), SmallVariationStats(sigma, mu, f0)


def max_deviation(sample_evals, nominal) -> np.ndarray:
    """Largest absolute departure from the nominal value, per objective."""
    F = _objective_array(sample_evals)
    f0 = _nominal_vector(nominal)
    if F.shape[0] < 1 or F.size == 0:
        raise RobustnessError("max_deviation needs at least one sample")
    return np.max(np.abs(F - f0), axis=0)


def evaluate_scenarios(problem: ProblemDef, X, scenarios: ScenarioSet) -> list[BatchEvaluation]:
    """Nominal designs evaluated in every scenario (no small noise)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if len(scenarios.points[0]) != problem.r:
        raise RobustnessError(f"scenario vectors have length {len(scenarios.points[0])}, expected r={problem.r}")
    return [evaluate_batch(problem, X, np.asarray(p)) for p in scenarios.points]


@dataclass(frozen=True)
class LargeVariationResult:
    i_f: np.ndarray        # (k,) 0/1
    ranks: np.ndarray      # (k, N) int, 0 where the model failed
    i_p: np.ndarray        # (k, N) float, NaN where the model failed
    i_rl: np.ndarray       # (k,)
    feasible: np.ndarray   # (k, N) bool


def large_variation(scenario_evals: Sequence[BatchEvaluation], probabilities: Sequence[float],
                    include_infeasible: bool = True) -> LargeVariationResult:
    """I_F, per-scenario rank and I_P, and I_RL for every archive member.

    In each scenario a member's rank is one plus the number of members that
    dominate it there.  With ``include_infeasible`` (the default) infeasible
    members count as dominators too.  Members whose model failed in a
    scenario take no part in that scenario's ranking and get I_F = 0.
    """
    h = np.asarray(probabilities, dtype=float)
    if len(scenario_evals) != len(h):
        raise RobustnessError("one probability per scenario required")
    if abs(math.fsum(h) - 1.0) > PROBABILITY_TOL:
        raise RobustnessError(f"scenario probabilities sum to {math.fsum(h)!r}, not 1")
    k = len(scenario_evals[0])
    n_sc = len(h)
    ranks = np.zeros((k, n_sc), dtype=int)
    i_p = np.full((k, n_sc), np.nan)
    feas = np.zeros((k, n_sc), dtype=bool)
    for j, ev in enumerate(scenario_evals):
        ok = ev.ok
        feas[:, j] = ok & feasible_rows(np.where(ok[:, None], ev.G, np.inf))
        idx = np.flatnonzero(ok)
        if idx.size:
            active = np.ones(idx.size, dtype=bool) if include_infeasible else feas[idx, j]
            counts = dominator_counts(ev.F[idx], active)
            ranks[idx, j] = counts + 1
            i_p[idx, j] = 1.0 / (counts + 1)
        failed = np.flatnonzero(~ok)
        if failed.size:
            log.warning("model failed for %d member(s) in scenario %d; I_F set to 0", failed.size, j + 1)
    i_f = np.all(feas, axis=1).astype(int)
    i_rl = np.ones(k)
    for s in np.flatnonzero(i_f):
        # equals 1 - sum(I_P h) because sum(h) = 1; exact 0 when every I_P is 1
        i_rl[s] = math.fsum(h * (1.0 - i_p[s]))
    return LargeVariationResult(i_f, ranks, i_p, np.clip(i_rl, 0.0, 1.0), feas)


def i_f(x, problem: ProblemDef, scenarios: ScenarioSet) -> int:
    """1 iff the nominal design is feasible in every scenario."""
    evs = evaluate_scenarios(problem, np.asarray(x, dtype=float)[None, :], scenarios)
    for j, ev in enumerate(evs):
        if not ev.ok[0]:
            log.warning("model failure in scenario %d (%s); I_F = 0", j + 1, ev.codes[0])
            return 0
        if not feasible_rows(ev.G)[0]:
            return 0
    return 1


def i_rl(solution: int, archive_X, problem: ProblemDef, scenarios: ScenarioSet,
         include_infeasible: bool = True) -> tuple[tuple[float, ...], float]:
    """(I_P per scenario, I_RL) of archive member ``solution``."""
    evs = evaluate_scenarios(problem, archive_X, scenarios)
    res = large_variation(evs, scenarios.probabilities, include_infeasible)
    return tuple(res.i_p[solution].tolist()), float(res.i_rl[solution])


def rf_space(records: Sequence[RobustnessRecord]) -> list[tuple[float, float]]:
    return [r.rf_point for r in records]


def robust_pareto_filter(rf_points) -> set:
    """Ids of the non-dominated points when minimizing both I_RS and I_RL.

    ``rf_points`` is a mapping id -> (I_RS, I_RL) or a sequence of
    (id, I_RS, I_RL).  Points with a non-finite coordinate are skipped.
    """
    items = rf_points.items() if isinstance(rf_points, dict) else [(t[0], t[1:]) for t in rf_points]
    pts = [ObjectivePoint(i, tuple(c)) for i, c in items if all(math.isfinite(v) for v in c)]
    if not pts:
        return set()
    return pareto_front(pts)


def nominal_extremes(F0: np.ndarray, G0: np.ndarray, ok: np.ndarray) -> ObjectiveExtremes:
    """Objective extremes over the feasible non-dominated members at p_0."""
    if not np.any(ok):
        raise ModelFailure("model failed for every archive member at the initial environment")
    feas = ok & feasible_rows(np.where(ok[:, None], G0, np.inf))
    idx = np.flatnonzero(feas)
    if idx.size == 0:
        raise RobustnessError("no feasible archive member at the initial environment")
    pts = [ObjectivePoint(int(i), tuple(F0[i])) for i in idx]
    front = sorted(pareto_front(pts))
    return ObjectiveExtremes.from_front(F0[front])


@dataclass
class SmallVariationResult:
    i_rs: float
    stats: Optional[SmallVariationStats]
    df_small: np.ndarray
    n_failed: int
    error: Optional[str] = None


def small_variation(problem: ProblemDef, x, p0, extremes: ObjectiveExtremes, n_samples: int,
                    seed: int, index: int, weights=None) -> SmallVariationResult:
    """Sample noise around (x, p0) with LHS and compute I_RS and Delta f^S."""
    x = np.asarray(x, dtype=float)
    p0 = np.asarray(p0, dtype=float)
    u = lhs(n_samples, problem.n + problem.r, derived_seed(seed, index))
    Xs = apply_noise(x, problem.dv_noise, u[:, : problem.n])
    Ps = apply_noise(p0, problem.dep_noise, u[:, problem.n:])
    samples = evaluate_batch(problem, Xs, Ps)
    nominal = evaluate_batch(problem, x[None, :], p0[None, :])
    n_failed = int(np.count_nonzero(~samples.ok))
    if n_failed:
        log.warning("solution %d: %d of %d noise samples failed and were dropped", index, n_failed, n_samples)
    if not nominal.ok[0]:
        return SmallVariationResult(math.nan, None, np.full(problem.m, np.nan), n_failed,
                                    f"nominal evaluation failed: {nominal.codes[0]}")
    f0 = nominal.F[0]
    good = samples.F[samples.ok]
    df = max_deviation(good, f0) if len(good) else np.full(problem.m, np.nan)
    try:
        value, stats = i_rs(good, f0, extremes, weights)
    except RobustnessError as exc:
        log.warning("solution %d: I_RS unavailable: %s", index, exc)
        return SmallVariationResult(math.nan, None, df, n_failed, str(exc))
    return SmallVariationResult(value, stats, df, n_failed)


def assess(problem: ProblemDef, X, ids: Sequence[Hashable], scenarios: ScenarioSet, n_samples: int = 1000,
           seed: int = 0, threads: int = 1, weights=None,
           include_infeasible: bool = True) -> tuple[list[RobustnessRecord], list[BatchEvaluation]]:
    """Full robustness assessment of an archive of nominal designs.

    Returns one record per archive member (archive order) and the
    per-scenario evaluations used for ranking.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] == 0:
        raise RobustnessError("empty-archive")
    if len(ids) != X.shape[0]:
        raise RobustnessError("one id per archive member required")
    if n_samples < 2:
        raise RobustnessError("at least two noise samples are needed")
    scen_evals = evaluate_scenarios(problem, X, scenarios)
    lv = large_variation(scen_evals, scenarios.probabilities, include_infeasible)
    j0 = scenarios.initial_index
    at_p0 = scen_evals[j0]
    extremes = nominal_extremes(at_p0.F, at_p0.G, at_p0.ok)
    p0 = np.asarray(scenarios.initial)

    def one(i: int) -> SmallVariationResult:
        return small_variation(problem, X[i], p0, extremes, n_samples, seed, i, weights)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            small = list(pool.map(one, range(X.shape[0])))
    else:
        small = [one(i) for i in range(X.shape[0])]

    records = []
    for i, sid in enumerate(ids):
        f0 = at_p0.F[i]
        ok_all = np.array([ev.ok[i] for ev in scen_evals])
        if ok_all.all() and at_p0.ok[i]:
            scen_F = np.array([ev.F[i] for ev in scen_evals])
            df_large = max_deviation(scen_F, f0)
        else:
            df_large = np.full(problem.m, np.nan)
        sv = small[i]
        notes = [sv.error] if sv.error else []
        records.append(RobustnessRecord(
            id=sid,
            x=tuple(X[i].tolist()),
            f0=tuple(f0.tolist()),
            i_rs=sv.i_rs,
            i_f=int(lv.i_f[i]),
            i_p=tuple(lv.i_p[i].tolist()),
            ranks=tuple(int(v) for v in lv.ranks[i]),
            i_rl=float(lv.i_rl[i]),
            sigma_f=tuple(sv.stats.sigma.tolist()) if sv.stats else (),
            mu_f=tuple(sv.stats.mu.tolist()) if sv.stats else (),
            df_small=tuple(sv.df_small.tolist()),
            df_large=tuple(df_large.tolist()),
            n_failed_samples=sv.n_failed,
            notes=notes,
        ))
    return records, scen_evals
