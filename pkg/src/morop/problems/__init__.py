"""Built-in problems, addressable by name from run configurations."""

from .numerical import REFERENCE_SOLUTIONS, numerical_eg1, numerical_problem, numerical_scenarios
from .polar import PolarTable, default_polar, load_polar
from .wind import wind_scenarios, wind_turbine_problem

BUILTIN = ("numerical_eg1", "bemt_rotor")

__all__ = [
    "BUILTIN",
    "PolarTable",
    "REFERENCE_SOLUTIONS",
    "default_polar",
    "load_polar",
    "numerical_eg1",
    "numerical_problem",
    "numerical_scenarios",
    "wind_scenarios",
    "wind_turbine_problem",
]
