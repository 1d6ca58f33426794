"""Problem abstraction: design vectors, environment parameters, evaluation.

A problem is minimize f(x, p) subject to g(x, p) <= 0 and box bounds on x.
Objectives are always in minimization sense and every constraint is stored
in ``g <= 0`` form.  Box bounds are kept apart from ``g``; the optimizer
repairs them, the evaluator never sees them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

OK = "ok"
MODEL_FAILURE = "model-failure"

# Batch evaluator: (X (k, n), P (k, r)) -> (F (k, m), G (k, q), failures).
# ``failures`` is None or a length-k sequence of failure codes (None = fine).
BatchEvaluator = Callable[[np.ndarray, np.ndarray], tuple]


class ModelError(Exception):
    """Raised for invalid problem definitions or inputs."""


class ModelFailure(ModelError):
    """The underlying model did not produce a usable result."""

    def __init__(self, message: str, code: str = MODEL_FAILURE):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class NoiseSpec:
    """Additive noise around a nominal value.

    ``kind`` is ``"none"``, ``"uniform"`` (``scale`` is the half-width) or
    ``"normal"`` (``scale`` is the standard deviation).
    """

    kind: str = "none"
    scale: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "uniform", "normal"):
            raise ModelError(f"unknown noise kind {self.kind!r}")
        if not (self.scale >= 0.0) or not math.isfinite(self.scale):
            raise ModelError(f"noise scale must be finite and >= 0, got {self.scale}")

    @classmethod
    def uniform(cls, half_width: float) -> "NoiseSpec":
        return cls("uniform", float(half_width))

    @classmethod
    def normal(cls, std: float) -> "NoiseSpec":
        return cls("normal", float(std))

    @classmethod
    def from_dict(cls, d: dict | None) -> "NoiseSpec":
        if d is None:
            return cls()
        kind = d.get("kind", "none")
        if kind == "uniform":
            return cls.uniform(d["half_width"])
        if kind == "normal":
            return cls.normal(d["std"])
        if kind == "none":
            return cls()
        raise ModelError(f"unknown noise kind {kind!r}")

    def to_dict(self) -> dict:
        if self.kind == "uniform":
            return {"kind": "uniform", "half_width": self.scale}
        if self.kind == "normal":
            return {"kind": "normal", "std": self.scale}
        return {"kind": "none"}


@dataclass(frozen=True)
class Evaluation:
    f: tuple[float, ...]
    g: tuple[float, ...]
    status: str = OK
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == OK


@dataclass(frozen=True)
class BatchEvaluation:
    """Row-wise evaluations; rows with ``ok == False`` carry NaN objectives."""

    F: np.ndarray
    G: np.ndarray
    ok: np.ndarray
    codes: tuple[Optional[str], ...]

    def __len__(self) -> int:
        return len(self.ok)

    def row(self, i: int) -> Evaluation:
        if self.ok[i]:
            return Evaluation(tuple(self.F[i].tolist()), tuple(self.G[i].tolist()))
        return Evaluation(
            tuple(self.F[i].tolist()),
            tuple(self.G[i].tolist()),
            MODEL_FAILURE,
            self.codes[i] or "non-finite output",
        )


@dataclass(frozen=True)
class ProblemDef:
    name: str
    dv_names: tuple[str, ...]
    dv_bounds: tuple[tuple[float, float], ...]
    dep_names: tuple[str, ...]
    dep_nominal: tuple[float, ...]
    objective_names: tuple[str, ...]
    constraint_names: tuple[str, ...]
    evaluator: BatchEvaluator = field(repr=False, compare=False)
    dv_noise: tuple[NoiseSpec, ...] = ()
    dep_noise: tuple[NoiseSpec, ...] = ()
    dv_nominal: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        n, r = len(self.dv_names), len(self.dep_names)
        if len(self.dv_bounds) != n:
            raise ModelError(f"{self.name}: {len(self.dv_bounds)} bounds for {n} design variables")
        for name, (lo, hi) in zip(self.dv_names, self.dv_bounds):
            if not lo <= hi:
                raise ModelError(f"{self.name}: lower bound > upper bound for {name}")
        if len(self.dep_nominal) != r:
            raise ModelError(f"{self.name}: {len(self.dep_nominal)} nominal values for {r} parameters")
        if not self.dv_noise:
            object.__setattr__(self, "dv_noise", tuple(NoiseSpec() for _ in range(n)))
        if not self.dep_noise:
            object.__setattr__(self, "dep_noise", tuple(NoiseSpec() for _ in range(r)))
        if len(self.dv_noise) != n or len(self.dep_noise) != r:
            raise ModelError(f"{self.name}: noise spec count does not match variable count")
        if self.dv_nominal is not None and len(self.dv_nominal) != n:
            raise ModelError(f"{self.name}: initial design has wrong length")

    @property
    def n(self) -> int:
        return len(self.dv_names)

    @property
    def m(self) -> int:
        return len(self.objective_names)

    @property
    def q(self) -> int:
        return len(self.constraint_names)

    @property
    def r(self) -> int:
        return len(self.dep_names)

    @property
    def lower(self) -> np.ndarray:
        return np.array([b[0] for b in self.dv_bounds], dtype=float)

    @property
    def upper(self) -> np.ndarray:
        return np.array([b[1] for b in self.dv_bounds], dtype=float)

    def in_bounds(self, x: Sequence[float]) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def dep_index(self, name: str) -> int:
        try:
            return self.dep_names.index(name)
        except ValueError:
            raise ModelError(f"{self.name}: no environment parameter named {name!r}") from None


def evaluate_batch(problem: ProblemDef, X, P) -> BatchEvaluation:
    """Evaluate ``k`` (x, p) pairs.  ``P`` may be a single vector (broadcast)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    P = np.asarray(P, dtype=float)
    if P.ndim == 1:
        P = np.broadcast_to(P, (X.shape[0], P.shape[0]))
    if X.shape[1] != problem.n:
        raise ModelError(f"design vector length {X.shape[1]} != n={problem.n}")
    if P.shape != (X.shape[0], problem.r):
        raise ModelError(f"environment array shape {P.shape} incompatible with r={problem.r}")
    out = problem.evaluator(X, P)
    F, G = out[0], out[1]
    codes = out[2] if len(out) > 2 and out[2] is not None else [None] * X.shape[0]
    F = np.asarray(F, dtype=float).reshape(X.shape[0], problem.m)
    G = np.asarray(G, dtype=float).reshape(X.shape[0], problem.q)
    ok = np.all(np.isfinite(F), axis=1) & np.all(np.isfinite(G), axis=1)
    ok &= np.array([c is None for c in codes], dtype=bool)
    codes = tuple(None if good else (c or "non-finite output") for good, c in zip(ok, codes))
    return BatchEvaluation(F, G, ok, codes)


def evaluate(problem: ProblemDef, x, p) -> Evaluation:
    """Evaluate one design in one environment.

    Model breakdowns come back as ``status == "model-failure"`` rather than
    as an exception; the caller decides what a failure means.
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    if x.shape != (problem.n,) or p.shape != (problem.r,):
        raise ModelError(
            f"expected x of length {problem.n} and p of length {problem.r}, "
            f"got {x.shape} and {p.shape}"
        )
    return evaluate_batch(problem, x[None, :], p[None, :]).row(0)


def is_feasible(e: Evaluation) -> bool:
    if not e.ok:
        raise ModelError("feasibility is undefined for a failed evaluation")
    return all(gk <= 0.0 for gk in e.g)


def feasible_rows(G: np.ndarray) -> np.ndarray:
    G = np.asarray(G, dtype=float)
    if G.shape[1] == 0:
        return np.ones(G.shape[0], dtype=bool)
    return np.all(G <= 0.0, axis=1)


def total_violation(G: np.ndarray) -> np.ndarray:
    G = np.asarray(G, dtype=float)
    if G.shape[1] == 0:
        return np.zeros(G.shape[0])
    return np.sum(np.maximum(G, 0.0), axis=1)
