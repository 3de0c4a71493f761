"""Random-walk solvers for linear and quasi-linear Dirichlet problems."""

__version__ = "0.1.0"

from .geometry import (Ball2D, Boundary, CircularAnnulus, Interval1D, RectAnnulus,
                       classify_exit, contains)
from .walk import StepScheme, WalkParams, run_walks, simulate_walk
from .linear import PointEstimate, estimate_point, estimate_profile
from .hitting import aggregate_hitting, estimate_hitting
from .nonlinear import (StopRule, solve_cubic, solve_nonlinear, cubic_problem,
                        validation_problem)
from .regression import fit_log_annulus, fit_quadratic
from .errors import BracketError, SingularFitError, WalkTruncatedError

__all__ = [
    "Ball2D", "Boundary", "CircularAnnulus", "Interval1D", "RectAnnulus",
    "classify_exit", "contains", "StepScheme", "WalkParams", "run_walks",
    "simulate_walk", "PointEstimate", "estimate_point", "estimate_profile",
    "aggregate_hitting", "estimate_hitting", "StopRule", "solve_cubic",
    "solve_nonlinear", "cubic_problem", "validation_problem", "fit_log_annulus",
    "fit_quadratic", "BracketError", "SingularFitError", "WalkTruncatedError",
]
