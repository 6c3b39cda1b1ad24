"""Mechanized checks of the Peres contextuality argument for spin measurements
separated in time, alongside the original two-particle version."""

from .contexts import (
    ContextRejected,
    build_spatial_contexts,
    build_temporal_contexts,
    eigen_action,
    scalar_identity_eigenvalue,
    scan_commuting_angles,
    third_context_factorization_check,
)
from .dynamics import PrecessionAngle, evolve_x, evolve_y, evolve_z, heisenberg_rhs, propagator
from .nchv import (
    ConstraintSystem,
    constraints_from_contexts,
    cross_check,
    enumerate_assignments,
    parity_certificate,
)
from .pauli import PauliPolynomial, PauliTerm, commutes, multiply_terms, tensor, to_dense
from .simulator import projective_measure, run_spatial_context, run_temporal_context
from .states import StateVector, make_state

__version__ = "0.1.0"

__all__ = [
    "ConstraintSystem",
    "ContextRejected",
    "PauliPolynomial",
    "PauliTerm",
    "PrecessionAngle",
    "StateVector",
    "build_spatial_contexts",
    "build_temporal_contexts",
    "commutes",
    "constraints_from_contexts",
    "cross_check",
    "eigen_action",
    "enumerate_assignments",
    "evolve_x",
    "evolve_y",
    "evolve_z",
    "heisenberg_rhs",
    "make_state",
    "multiply_terms",
    "parity_certificate",
    "projective_measure",
    "propagator",
    "run_spatial_context",
    "run_temporal_context",
    "scalar_identity_eigenvalue",
    "scan_commuting_angles",
    "tensor",
    "third_context_factorization_check",
    "to_dense",
]
