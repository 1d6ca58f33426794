"""Real-coded NSGA-II with feasibility-first constraint handling."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import ModelError, ProblemDef, evaluate_batch, total_violation
from .pareto import dominance_matrix

log = logging.getLogger(__name__)

DEDUP_TOL = 1e-9


class NoFeasibleSolution(ModelError):
    pass


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 200
    generations: int = 250
    crossover_prob: float = 0.9
    crossover_eta: float = 15.0
    mutation_prob: Optional[float] = None  # None -> 1/n
    mutation_eta: float = 20.0
    seed: int = 0
    feasibility_first: bool = True

    def __post_init__(self):
        if self.population_size < 4 or self.population_size % 2:
            raise ModelError("population_size must be even and >= 4")
        if self.generations < 0:
            raise ModelError("generations must be >= 0")
        for name in ("crossover_prob", "mutation_prob"):
            v = getattr(self, name)
            if v is not None and not 0.0 <= v <= 1.0:
                raise ModelError(f"{name} must lie in [0, 1]")
        if self.crossover_eta <= 0 or self.mutation_eta <= 0:
            raise ModelError("distribution indices must be > 0")

    @classmethod
    def from_dict(cls, d: dict) -> "GAConfig":
        known = cls.__dataclass_fields__.keys()
        unknown = set(d) - set(known)
        if unknown:
            raise ModelError(f"unknown GA keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ParetoArchive:
    ids: list
    X: np.ndarray
    F: np.ndarray
    G: np.ndarray
    generations_run: int = 0
    history: list = field(default_factory=list, repr=False)

    def __len__(self) -> int:
        return len(self.ids)


def constrained_dominance(F: np.ndarray, cv: Optional[np.ndarray] = None) -> np.ndarray:
    """Dominance matrix under the feasibility-first rule.

    A feasible row beats any infeasible one, two infeasible rows compare by
    total violation and two feasible rows by Pareto dominance.
    """
    if cv is None:
        return dominance_matrix(F)
    cv = np.asarray(cv, dtype=float)
    feas = cv <= 0.0
    Ff = np.where(feas[:, None], F, 0.0)  # keep NaNs of failed rows out of the comparison
    pareto = dominance_matrix(Ff) & feas[:, None] & feas[None, :]
    feas_beats = feas[:, None] & ~feas[None, :]
    cv_beats = ~feas[:, None] & ~feas[None, :] & (cv[:, None] < cv[None, :])
    return pareto | feas_beats | cv_beats


def fast_nondominated_sort(F, cv=None) -> list[np.ndarray]:
    """Partition rows into successive non-dominated fronts (index arrays)."""
    F = np.asarray(F, dtype=float)
    if len(F) == 0:
        return []
    D = constrained_dominance(F, cv)
    remaining = D.sum(axis=0)
    assigned = np.zeros(len(F), dtype=bool)
    fronts = []
    while not assigned.all():
        current = np.flatnonzero((remaining == 0) & ~assigned)
        fronts.append(current)
        assigned[current] = True
        remaining = remaining - D[current].sum(axis=0)
    return fronts


def crowding_distance(F) -> np.ndarray:
    """Crowding distance of each member of one front.

    Boundary members of every objective get ``inf``; interior members sum
    the normalized gap between their two neighbours.
    """
    F = np.asarray(F, dtype=float)
    k, m = F.shape
    dist = np.zeros(k)
    if k <= 2:
        return np.full(k, np.inf)
    for j in range(m):
        order = np.argsort(F[:, j], kind="stable")
        col = F[order, j]
        span = col[-1] - col[0]
        dist[order[0]] = dist[order[-1]] = np.inf
        if span <= 0.0 or not np.isfinite(span):
            continue
        dist[order[1:-1]] += (col[2:] - col[:-2]) / span
    return dist


def hypervolume_2d(F, ref) -> float:
    """Area dominated by the points of ``F`` and bounded by ``ref``."""
    F = np.asarray(F, dtype=float)
    F = F[np.all(F < np.asarray(ref), axis=1)]
    if len(F) == 0:
        return 0.0
    F = F[np.lexsort((F[:, 1], F[:, 0]))]
    area, best_f2 = 0.0, ref[1]
    for f1, f2 in F:
        if f2 < best_f2:
            area += (ref[0] - f1) * (best_f2 - f2)
            best_f2 = f2
    return float(area)


def tournament_winner(a: int, b: int, rank: np.ndarray, crowd: np.ndarray) -> int:
    if rank[a] != rank[b]:
        return a if rank[a] < rank[b] else b
    if crowd[a] != crowd[b]:
        return a if crowd[a] > crowd[b] else b
    return min(a, b)


def sbx_crossover(p1, p2, lower, upper, eta, prob, rng):
    """Simulated binary crossover with bound-aware spread factors."""
    c1, c2 = p1.copy(), p2.copy()
    if rng.random() > prob:
        return c1, c2
    for i in range(len(p1)):
        if rng.random() > 0.5 or abs(p1[i] - p2[i]) <= 1e-14:
            continue
        y1, y2 = min(p1[i], p2[i]), max(p1[i], p2[i])
        lo, hi = lower[i], upper[i]
        u = rng.random()
        children = []
        for beta in (1.0 + 2.0 * (y1 - lo) / (y2 - y1), 1.0 + 2.0 * (hi - y2) / (y2 - y1)):
            alpha = 2.0 - beta ** (-(eta + 1.0))
            if u <= 1.0 / alpha:
                bq = (u * alpha) ** (1.0 / (eta + 1.0))
            else:
                bq = (1.0 / (2.0 - u * alpha)) ** (1.0 / (eta + 1.0))
            children.append(bq)
        ch1 = 0.5 * ((y1 + y2) - children[0] * (y2 - y1))
        ch2 = 0.5 * ((y1 + y2) + children[1] * (y2 - y1))
        ch1, ch2 = min(max(ch1, lo), hi), min(max(ch2, lo), hi)
        if rng.random() <= 0.5:
            ch1, ch2 = ch2, ch1
        c1[i], c2[i] = ch1, ch2
    return c1, c2


def polynomial_mutation(x, lower, upper, eta, prob, rng):
    y = x.copy()
    for i in range(len(x)):
        if rng.random() > prob:
            continue
        lo, hi = lower[i], upper[i]
        if hi <= lo:
            continue
        d1, d2 = (y[i] - lo) / (hi - lo), (hi - y[i]) / (hi - lo)
        u = rng.random()
        mpow = 1.0 / (eta + 1.0)
        if u < 0.5:
            val = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1) ** (eta + 1.0)
            dq = val**mpow - 1.0
        else:
            val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2) ** (eta + 1.0)
            dq = 1.0 - val**mpow
        y[i] = min(max(y[i] + dq * (hi - lo), lo), hi)
    return y


def _violation(problem: ProblemDef, X: np.ndarray):
    ev = evaluate_batch(problem, X, np.asarray(problem.dep_nominal))
    cv = np.where(ev.ok, total_violation(np.where(ev.ok[:, None], ev.G, 0.0)), np.inf)
    return ev.F, ev.G, cv, ev.ok


def _rank_and_crowd(F, cv, feasibility_first=True):
    fronts = fast_nondominated_sort(F, cv if feasibility_first else None)
    rank = np.empty(len(F), dtype=int)
    crowd = np.zeros(len(F))
    for r, idx in enumerate(fronts):
        rank[idx] = r
        finite = idx[np.all(np.isfinite(F[idx]), axis=1)]
        if finite.size:
            crowd[finite] = crowding_distance(F[finite])
    return fronts, rank, crowd


def optimize(problem: ProblemDef, config: GAConfig = GAConfig(),
             callback: Optional[Callable] = None, initial: Optional[np.ndarray] = None) -> ParetoArchive:
    """Run NSGA-II at the nominal environment and return the feasible front.

    ``callback(generation, X, F, cv)`` is called after each survival step.
    ``initial`` optionally seeds the first population (rows are clipped to
    the bounds; missing rows are drawn uniformly).
    """
    rng = np.random.default_rng(config.seed)
    lower, upper = problem.lower, problem.upper
    N, n = config.population_size, problem.n
    pm = config.mutation_prob if config.mutation_prob is not None else 1.0 / n

    X = lower + (upper - lower) * rng.random((N, n))
    if initial is not None:
        init = np.clip(np.atleast_2d(np.asarray(initial, dtype=float)), lower, upper)[:N]
        X[: len(init)] = init
    F, G, cv, ok = _violation(problem, X)
    if not config.feasibility_first:
        cv = np.where(ok, 0.0, np.inf)
    _, rank, crowd = _rank_and_crowd(F, cv, config.feasibility_first)
    if callback:
        callback(0, X, F, cv)

    for gen in range(1, config.generations + 1):
        pairs = rng.integers(0, N, size=(N, 2))
        parents = [tournament_winner(a, b, rank, crowd) for a, b in pairs]
        children = np.empty_like(X)
        for k in range(0, N, 2):
            c1, c2 = sbx_crossover(X[parents[k]], X[parents[k + 1]], lower, upper,
                                   config.crossover_eta, config.crossover_prob, rng)
            children[k] = polynomial_mutation(c1, lower, upper, config.mutation_eta, pm, rng)
            children[k + 1] = polynomial_mutation(c2, lower, upper, config.mutation_eta, pm, rng)
        children = np.clip(children, lower, upper)
        Fc, Gc, cvc, okc = _violation(problem, children)
        if not config.feasibility_first:
            cvc = np.where(okc, 0.0, np.inf)

        XX = np.vstack([X, children])
        FF, GG, CC, OO = np.vstack([F, Fc]), np.vstack([G, Gc]), np.concatenate([cv, cvc]), np.concatenate([ok, okc])
        fronts, _, _ = _rank_and_crowd(FF, CC, config.feasibility_first)
        chosen = []
        for idx in fronts:
            if len(chosen) + len(idx) <= N:
                chosen.extend(idx.tolist())
                continue
            finite = np.all(np.isfinite(FF[idx]), axis=1)
            d = np.zeros(len(idx))
            if finite.any():
                d[finite] = crowding_distance(FF[idx[finite]])
            order = np.argsort(-d, kind="stable")
            chosen.extend(idx[order[: N - len(chosen)]].tolist())
            break
        sel = np.array(chosen)
        X, F, G, cv, ok = XX[sel], FF[sel], GG[sel], CC[sel], OO[sel]
        _, rank, crowd = _rank_and_crowd(F, cv, config.feasibility_first)
        if callback:
            callback(gen, X, F, cv)

    return final_archive(X, F, G, ok, config.generations)


def final_archive(X, F, G, ok, generations_run=0) -> ParetoArchive:
    """Rank-1 feasible members, deduplicated on the design vector, sorted by f1."""
    feas = ok & (total_violation(np.where(ok[:, None], G, np.inf)) <= 0.0)
    idx = np.flatnonzero(feas)
    if idx.size == 0:
        raise NoFeasibleSolution("no-feasible-solution: final population has no feasible member")
    D = dominance_matrix(F[idx])
    front = idx[D.sum(axis=0) == 0]
    keep = []
    for i in front:
        if not any(np.all(np.abs(X[i] - X[j]) <= DEDUP_TOL) for j in keep):
            keep.append(i)
    keep = np.array(keep)
    order = np.lexsort(tuple(F[keep, j] for j in reversed(range(F.shape[1]))))
    keep = keep[order]
    ids = [f"S{i + 1:03d}" for i in range(len(keep))]
    return ParetoArchive(ids, X[keep].copy(), F[keep].copy(), G[keep].copy(), generations_run)
