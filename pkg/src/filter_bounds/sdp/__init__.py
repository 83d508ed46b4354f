from .constraints import ConstraintSet, assemble_constraints, max_violation
from .solve import SdpSolution, solve_bounds, unconstrained_maximum

__all__ = [
    "ConstraintSet",
    "SdpSolution",
    "assemble_constraints",
    "max_violation",
    "solve_bounds",
    "unconstrained_maximum",
]
