"""Monochromatic edges in Kneser graphs and agreeable sets."""

from .agreeable import (
    AgreeableSolution,
    MonotonicityViolation,
    ViolationCertificate,
    map_agreeable_solution_back,
    map_kneser_solution,
    reduce_kneser_to_agreeable,
    reduce_to_kneser,
    search_agreeable_exhaustive,
    solve_agreeable,
)
from .combinatorics import (
    binomial,
    ekr_bound,
    enumerate_ksubsets,
    enumerate_stable_ksubsets,
    hilton_milner_bound,
    hilton_milner_extremal_family,
    lemma8_edge_density_bound,
    lemma10_disjoint_prob_bound,
    schrijver_vertex_count,
)
from .elimination import Edge, EliminationParams, OffPalette, PopularPair, eliminate, verify_popular_pair
from .oracles import (
    BudgetExceeded,
    KneserError,
    KneserInstance,
    OracleInconsistency,
    make_canonical_coloring,
    make_constant_coloring,
    make_hard_instance,
    make_random_coloring,
    verify_edge,
)
from .solvers import SolverParams, SolverResult, solve, solve_bruteforce, solve_fpt, solve_schrijver

__version__ = "0.1.0"
