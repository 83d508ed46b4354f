"""Fidelity bounds for probabilistic quantum filters.

Simulates probe-state characterization of single-Kraus quantum operations
and evaluates analytical (generalized Hofmann) and semidefinite-program
lower/upper bounds on the process fidelity with a target filter.
"""

from .bounds import (
    BoundsReport,
    bounds_report,
    eigenprobe_lower_bound,
    general_lower_bound,
    hofmann_unitary_bounds,
    mean_output_correction,
    upper_bounds,
)
from .core import (
    choi_of_kraus,
    computational_basis,
    fourier_basis,
    hadamard_product_basis,
    maximally_entangled_basis,
    maximally_entangled_state,
    output_state,
    process_fidelity,
)
from .filters import (
    MixtureChannel,
    QuantumFilter,
    ZeroWeightError,
    filter_fidelity,
    ideal_output,
    mixture_channel,
    ppbs_filter,
    quantum_filter,
    random_filter,
    random_unitary,
)
from .probes import (
    InsufficientDataError,
    MeasurementRecord,
    ProbeEnsemble,
    ProbeSet,
    ReducedStats,
    eigen_probe_ensemble,
    product_probe_ensemble,
    record_from_dict,
    reduce,
    run_ensemble,
    theoretical_probabilities,
)
from .sdp import ConstraintSet, SdpSolution, assemble_constraints, solve_bounds

__all__ = [
    "BoundsReport",
    "ConstraintSet",
    "InsufficientDataError",
    "MeasurementRecord",
    "MixtureChannel",
    "ProbeEnsemble",
    "ProbeSet",
    "QuantumFilter",
    "ReducedStats",
    "SdpSolution",
    "ZeroWeightError",
    "assemble_constraints",
    "bounds_report",
    "choi_of_kraus",
    "computational_basis",
    "eigen_probe_ensemble",
    "eigenprobe_lower_bound",
    "filter_fidelity",
    "fourier_basis",
    "general_lower_bound",
    "hadamard_product_basis",
    "hofmann_unitary_bounds",
    "ideal_output",
    "maximally_entangled_basis",
    "maximally_entangled_state",
    "mean_output_correction",
    "mixture_channel",
    "output_state",
    "ppbs_filter",
    "process_fidelity",
    "product_probe_ensemble",
    "quantum_filter",
    "random_filter",
    "random_unitary",
    "record_from_dict",
    "reduce",
    "run_ensemble",
    "solve_bounds",
    "theoretical_probabilities",
    "upper_bounds",
]

__version__ = "0.1.0"
