"""Greedy reduced-basis selection, orthogonal greedy algorithms and certified
entropy-number brackets, with verification experiments."""
from .entropy import (
    ConvexHullSet,
    EntropyEstimate,
    Method,
    carl_rate_check,
    delta_n_bound,
    entropy_hull,
    entropy_pointset,
    entropy_profile,
    stirling_factor,
    volume_lower_bound,
)
from .errors import (
    BudgetExceeded,
    DegenerateSet,
    DimensionMismatch,
    EmptySet,
    GreedyEntropyError,
    IterationBudgetExceeded,
    LpBudgetExceeded,
    NotInnerProductSpace,
    RankDeficient,
    RankExhausted,
    SingularSystem,
    SolverFailure,
)
from .greedy_rbm import GreedyTrace, PointCloud, run_greedy
from .kernels import BACKEND
from .linalg_core import AmbientSpace, OrthoBasis, dist_lp, extend_basis, project, residual_norms
from .oga import (
    Dictionary,
    OgaTrace,
    best_n_term,
    k_functional,
    recurrence_bound,
    run_oga,
    run_pga,
    run_rga,
    variation_norm,
)
from .pde import CoefficientFamily, EllipticProblem1D, EllipticProblem2D, sample_manifold, solve_1d, solve_2d

__version__ = "0.1.0"
