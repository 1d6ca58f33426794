"""Robustness analysis of multi-objective Pareto sets under small and large variations."""

from .core import Evaluation, NoiseSpec, ProblemDef, evaluate, evaluate_batch, is_feasible
from .nsga2 import GAConfig, ParetoArchive, optimize
from .pareto import ObjectivePoint, dominates, pareto_front, rank_individuals
from .robustness import (
    ObjectiveExtremes,
    RobustnessRecord,
    ScenarioSet,
    assess,
    bin_normal,
    i_rs,
    max_deviation,
    robust_pareto_filter,
    rf_space,
)
from .sampling import apply_noise, lhs

__version__ = "0.1.0"

__all__ = [
    "Evaluation",
    "GAConfig",
    "NoiseSpec",
    "ObjectiveExtremes",
    "ObjectivePoint",
    "ParetoArchive",
    "ProblemDef",
    "RobustnessRecord",
    "ScenarioSet",
    "apply_noise",
    "assess",
    "bin_normal",
    "dominates",
    "evaluate",
    "evaluate_batch",
    "i_rs",
    "is_feasible",
    "lhs",
    "max_deviation",
    "optimize",
    "pareto_front",
    "rank_individuals",
    "rf_space",
    "robust_pareto_filter",
]
