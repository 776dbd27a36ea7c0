"""Pole placement for MIMO systems by refined cyclic-subspace transformations."""
from ._kernels import BACKEND
from .decomposition import (
    CONTROLLER,
    OBSERVER,
    CanonicalTransform,
    ChainDecomposition,
    StateSpaceModel,
    assemble_transform,
    build_chains,
    controllability_matrix,
    observability_matrix,
    validate_special_forms,
)
from .errors import *  # noqa: F401,F403
from .matrix import (
    Polynomial,
    Stability,
    char_poly,
    condition_estimate,
    poly_from_roots,
    poly_roots,
    rank_revealing,
    routh_hurwitz_stable,
    solve_linear,
)
from .simulation import SimulationTrace, error_envelope_check, simulate
from .synthesis import (
    GainSynthesisResult,
    PolePartition,
    assemble_structured_gain,
    default_observer_poles,
    design_controller,
    design_observer,
    extract_block_coefficients,
    partition_poles,
    solve_gain_coefficients,
)
from .verification import VerificationReport, separation_matrix, verify_design

__version__ = "0.1.0"
