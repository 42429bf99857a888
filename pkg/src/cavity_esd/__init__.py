"""Entanglement dynamics of two qubits in separate vacuum cavities, with the
counter-rotating coupling kept."""

from .entanglement import (
    InitialStateSpec,
    StateKind,
    concurrence_general,
    concurrence_x,
    initial_state,
)
from .kernels import SystemParams, coefficient_set, evaluate_kernels
from .propagator import (
    MapCoefficients,
    assemble_joint,
    build_transfer_matrix,
    map_coefficients,
    map_trajectory,
    propagate_single,
    solve_riccati,
)

__version__ = "0.1.0"
