"""Pareto dominance, individual ranking and front extraction (minimization)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np


@dataclass(frozen=True)
class ObjectivePoint:
    id: Hashable
    f: tuple[float, ...]
    feasible: bool = True

    def __post_init__(self):
        object.__setattr__(self, "f", tuple(float(v) for v in self.f))


@dataclass(frozen=True)
class RankResult:
    ranks: dict

    def __getitem__(self, key) -> int:
        return self.ranks[key]

    def performance_index(self, key) -> float:
        return 1.0 / self.ranks[key]


def dominates(a: ObjectivePoint | Sequence[float], b: ObjectivePoint | Sequence[float]) -> bool:
    """True iff ``a`` is no worse than ``b`` everywhere and strictly better somewhere."""
    fa = a.f if isinstance(a, ObjectivePoint) else tuple(a)
    fb = b.f if isinstance(b, ObjectivePoint) else tuple(b)
    if len(fa) != len(fb):
        raise ValueError(f"dimension mismatch: {len(fa)} vs {len(fb)} objectives")
    return all(x <= y for x, y in zip(fa, fb)) and any(x < y for x, y in zip(fa, fb))


def dominance_matrix(F: np.ndarray) -> np.ndarray:
    """``D[i, j]`` is True when row ``i`` dominates row ``j``."""
    F = np.asarray(F, dtype=float)
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    return le & lt


def dominator_counts(F: np.ndarray, active: np.ndarray | None = None) -> np.ndarray:
    """Number of rows (restricted to ``active`` ones) dominating each row."""
    D = dominance_matrix(F)
    if active is not None:
        D = D & np.asarray(active, dtype=bool)[:, None]
    return D.sum(axis=0)


def rank_individuals(points: Sequence[ObjectivePoint], include_infeasible: bool = True) -> RankResult:
    """Rank = 1 + number of points dominating it.

    With ``include_infeasible`` False, only feasible points count as
    dominators; every point still receives a rank.
    """
    if not points:
        raise ValueError("cannot rank an empty set of points")
    m = {len(p.f) for p in points}
    if len(m) != 1:
        raise ValueError("points have differing objective counts")
    F = np.array([p.f for p in points], dtype=float)
    active = None if include_infeasible else np.array([p.feasible for p in points])
    counts = dominator_counts(F, active)
    return RankResult({p.id: int(c) + 1 for p, c in zip(points, counts)})


def pareto_front(points: Sequence[ObjectivePoint]) -> set:
    """Ids of feasible points not dominated by any feasible point."""
    if not points:
        raise ValueError("cannot extract the front of an empty set of points")
    feas = [p for p in points if p.feasible]
    if not feas:
        return set()
    ranks = rank_individuals(feas, include_infeasible=True)
    return {p.id for p in feas if ranks[p.id] == 1}


def nondominated_mask(F: np.ndarray) -> np.ndarray:
    F = np.asarray(F, dtype=float)
    if len(F) == 0:
        return np.zeros(0, dtype=bool)
    return dominator_counts(F) == 0
