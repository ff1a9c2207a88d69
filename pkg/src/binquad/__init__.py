"""Binary quadratic optimization: low-rank SDP, rank descent, entropy penalties, Ising safety."""

from .core import (IsingModel, QuadraticProblem, QuboProblem, WeightedGraph, brute_force_max, energy,
                   ising_to_quadratic, quadratic_objective, qubo_to_quadratic)
from .epsdp import EntropySpec, EpsdpSchedule, epsdp_solve
from .ising import InfectionPattern, StateClass, map_attractive, map_bruteforce
from .lowrank import Factor, SolveOptions, bm_solve, gw_round
from .prevent import ProjectionOptions, project_to_safe
from .rankmin import RankMinOptions, Schatten, SingularValue, rank_descent

__version__ = "0.1.0"

__all__ = [
    "EntropySpec", "EpsdpSchedule", "Factor", "InfectionPattern", "IsingModel", "ProjectionOptions",
    "QuadraticProblem", "QuboProblem", "RankMinOptions", "Schatten", "SingularValue", "SolveOptions",
    "StateClass", "WeightedGraph", "bm_solve", "brute_force_max", "energy", "epsdp_solve", "gw_round",
    "ising_to_quadratic", "map_attractive", "map_bruteforce", "project_to_safe", "quadratic_objective",
    "qubo_to_quadratic", "rank_descent",
]
