"""Two-blade rotor design: maximize power, minimize thrust, 1 kW <= P <= 25 kW."""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..core import NoiseSpec, ProblemDef
from ..robustness import ScenarioSet
from .bemt import CHORD_SUM, N_ELEMENTS, solve_rotor
from .polar import PolarTable, default_polar

P_MIN = 1000.0   # W
P_MAX = 25000.0  # W

DV_NAMES = ("gamma_r", "gamma_t", "c_r", "omega")
DV_INITIAL = (22.8, 3.61, 0.737, 72.0)
DV_BOUNDS = ((0.0, 35.0), (-5.0, 15.0), (0.595, 0.895), (40.0, 100.0))
DV_NOISE = (NoiseSpec.uniform(1.0), NoiseSpec.uniform(0.5), NoiseSpec.uniform(0.005), NoiseSpec.uniform(2.0))

DEP_NAMES = ("b", "r_t", "r_r", "rho", "v_re")
DEP_NOMINAL = (2.0, 5.0, 1.27, 1.25, 10.0)
# wind speed noise is quoted as +-4 m/s; its standard deviation is 2 m/s
DEP_NOISE = (NoiseSpec(), NoiseSpec.uniform(0.05), NoiseSpec.uniform(0.005),
             NoiseSpec.uniform(0.05), NoiseSpec.normal(2.0))

WIND_SPEEDS = (6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0, 13.0, 14.0)
WIND_PROBABILITIES = (0.028, 0.066, 0.124, 0.180, 0.204, 0.180, 0.124, 0.066, 0.028)


def rotor_evaluator(polar: PolarTable, n_elements: int = N_ELEMENTS, chord_sum: float = CHORD_SUM):
    def evaluate(X: np.ndarray, P: np.ndarray):
        gamma_r, gamma_t, c_r, omega = X.T
        b, r_t, r_r, rho, v = P.T
        sol = solve_rotor(gamma_r, gamma_t, c_r, chord_sum - c_r, omega, np.round(b), r_t, r_r, rho, v,
                          polar, n_elements=n_elements)
        F = np.column_stack([-sol.P, sol.F_a])
        G = np.column_stack([P_MIN - sol.P, sol.P - P_MAX])
        return F, G, sol.codes

    return evaluate


def wind_turbine_problem(polar: Optional[PolarTable] = None, n_elements: int = N_ELEMENTS) -> ProblemDef:
    polar = polar if polar is not None else default_polar()
    return ProblemDef(
        name="bemt_rotor",
        dv_names=DV_NAMES,
        dv_bounds=DV_BOUNDS,
        dep_names=DEP_NAMES,
        dep_nominal=DEP_NOMINAL,
        objective_names=("neg_power_W", "thrust_N"),
        constraint_names=("power_min", "power_max"),
        evaluator=rotor_evaluator(polar, n_elements),
        dv_noise=DV_NOISE,
        dep_noise=DEP_NOISE,
        dv_nominal=DV_INITIAL,
    )


def wind_scenarios(problem: Optional[ProblemDef] = None) -> ScenarioSet:
    """Nine wind speeds 6..14 m/s; the most probable (10 m/s) is the initial one."""
    problem = problem if problem is not None else wind_turbine_problem()
    return ScenarioSet.vary(problem, "v_re", WIND_SPEEDS, WIND_PROBABILITIES)
