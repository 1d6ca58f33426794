"""One-variable, two-objective test problem with one environment parameter.

minimize f1 = x + p/2 and f2 = (x - p)^2 subject to f1 >= 3, 1 <= x <= 10.
The constraint is stored as g1 = 3 - f1 <= 0.
"""

from __future__ import annotations

import numpy as np

from ..core import Evaluation, NoiseSpec, ProblemDef
from ..robustness import ScenarioSet

X_BOUNDS = (1.0, 10.0)
P_NOMINAL = 5.0
F1_MIN = 3.0
X_NOISE = 0.1

SCENARIO_P = (3.0, 5.0, 8.0)
SCENARIO_H = (0.2, 0.5, 0.3)


def numerical_eg1(x: float, p: float) -> Evaluation:
    f1 = x + p / 2.0
    f2 = (x - p) ** 2
    return Evaluation((f1, f2), (F1_MIN - f1,))


def _batch(X: np.ndarray, P: np.ndarray):
    x, p = X[:, 0], P[:, 0]
    f1 = x + p / 2.0
    f2 = (x - p) ** 2
    return np.column_stack([f1, f2]), (F1_MIN - f1)[:, None], None


def numerical_problem(x_noise: float = X_NOISE) -> ProblemDef:
    return ProblemDef(
        name="numerical_eg1",
        dv_names=("x",),
        dv_bounds=(X_BOUNDS,),
        dep_names=("p",),
        dep_nominal=(P_NOMINAL,),
        objective_names=("f1", "f2"),
        constraint_names=("f1_min",),
        evaluator=_batch,
        dv_noise=(NoiseSpec.uniform(x_noise),),
        dep_noise=(NoiseSpec(),),
    )


def numerical_scenarios() -> ScenarioSet:
    return ScenarioSet(tuple((p,) for p in SCENARIO_P), SCENARIO_H)


# the five alternative solutions A..E at p = 5
REFERENCE_SOLUTIONS = {"A": 1.0, "B": 2.0, "C": 3.0, "D": 4.0, "E": 5.0}
