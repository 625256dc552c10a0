"""Random normal-form games: generation under three measures, exact pure /
near-equilibrium counting, Poisson approximations with explicit error
bounds, and reproducible Monte Carlo share sweeps."""

__version__ = "0.1.0"

from .distributions import (Cauchy, Distribution, Exponential, Gaussian,
                            Pareto, TailClass, Uniform, parse_distribution)
from .equilibria import (EquilibriumReport, analyze, deviation_gain,
                         exists_eps_star, naive_analyze)
from .games import Game, GameShape, decode, encode, line
from .generators import (InteractionGraph, gen_copula, gen_iid, gen_network,
                         is_alpha_expander, is_well_connected)
from .montecarlo import (ExperimentConfig, ShareEstimate, estimate_share,
                         fig1_suite, thm_check, wilson_interval)
from .rng import SeedSpec
from .theory import (TheoryReport, convergence_table, p_integral,
                     poisson_tail, q_integral, theory_report)

__all__ = [
    "__version__",
    "Cauchy", "Distribution", "Exponential", "Gaussian", "Pareto",
    "TailClass", "Uniform", "parse_distribution",
    "EquilibriumReport", "analyze", "deviation_gain", "exists_eps_star",
    "naive_analyze",
    "Game", "GameShape", "decode", "encode", "line",
    "InteractionGraph", "gen_copula", "gen_iid", "gen_network",
    "is_alpha_expander", "is_well_connected",
    "ExperimentConfig", "ShareEstimate", "estimate_share", "fig1_suite",
    "thm_check", "wilson_interval",
    "SeedSpec",
    "TheoryReport", "convergence_table", "p_integral", "poisson_tail",
    "q_integral", "theory_report",
]
