"""Janus-faced master equations in truncated Fock spaces.

The generator ``-ig[F + F^dagger, rho] + (kappa/2)(2 F rho F^dagger - F^dagger F rho - rho F^dagger F)``
is built in the thermo-field (doubled-space) picture for four concrete
choices of ``F``; its short-time drive and its steady states are compared
with squeezed, pair-coherent and cat reference states.
"""

from .evolution import Trajectory, evolve, expm_oracle, short_term_state, verify_G_eigenstate
from .fock import FockSpace, apply, ladder_op, make_space, op_algebra
from .janus import JanusConfig, JanusRealization, build_pair, commutator_residual
from .reference import cat_state, fidelity, pair_coherent, squeezed_vacuum, two_mode_squeezed
from .steady import SteadyStateResult, eigen_residuals, sector_basis, steady_state
from .tfd import (
    Liouvillian,
    VectorizedState,
    build_liouvillian,
    devectorize,
    identity_vector,
    lift,
    tilde,
    trace_form_check,
    vectorize,
)

__version__ = "0.1.0"

__all__ = [
    "FockSpace", "JanusConfig", "JanusRealization", "Liouvillian", "SteadyStateResult", "Trajectory",
    "VectorizedState", "apply", "build_liouvillian", "build_pair", "cat_state", "commutator_residual",
    "devectorize", "eigen_residuals", "evolve", "expm_oracle", "fidelity", "identity_vector", "ladder_op",
    "lift", "make_space", "op_algebra", "pair_coherent", "sector_basis", "short_term_state",
    "squeezed_vacuum", "steady_state", "tilde", "trace_form_check", "two_mode_squeezed", "vectorize",
    "verify_G_eigenstate",
]
