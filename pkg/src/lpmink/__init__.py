"""Solver for the discrete L_p Minkowski problem with p < 0."""
from .config import SolverOptions, Tolerances
from .kernels import BACKEND as KERNEL_BACKEND
from .measure import (
    DiscreteMeasure,
    Subspace,
    build_measure,
    find_essential_subspaces,
    is_concentrated_on_closed_hemisphere,
    is_in_general_position,
    satisfies_existence_hypothesis,
)
from .polytope import Polytope, build_polytope

__version__ = "0.1.0"

# imported after __version__: cli reads it
from .inner import minimize_phi  # noqa: E402
from .outer import normalized_objective, solve, stationarity_residual  # noqa: E402
from .verify import (  # noqa: E402
    SolveResult,
    VerificationReport,
    lp_surface_area_measure,
    rescale_to_solution,
    verify_solution,
)
