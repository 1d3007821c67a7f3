"""Thermo-field-dynamics vectorization and Liouvillian assembly.

A density matrix ``rho`` on a space of dimension ``d`` becomes the vector
``|rho> = (rho x 1)|I>`` of length ``d**2``, with amplitude ``rho[n, m]`` at
position ``n*d + m`` (non-tilde index major). Operators act on the doubled
space through ``lift(A) = A x 1`` and ``tilde(A) = 1 x conj(A)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .fock import FockError, FockSpace, SparseOperator, adjoint, canonical
from .janus import JanusRealization

#: elementwise agreement demanded between the tilde and Kronecker assemblies
ASSEMBLY_TOL = 1e-13


class LiouvillianError(ValueError):
    pass


@dataclass(frozen=True)
class VectorizedState:
    space: FockSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        if amps.shape[0] != self.space.dim**2:
            raise FockError(f"expected {self.space.dim ** 2} amplitudes, got {amps.shape[0]}")
        object.__setattr__(self, "amplitudes", amps)

    def matrix(self) -> np.ndarray:
        """Dense devectorized density matrix (a view, not a copy)."""
        d = self.space.dim
        return self.amplitudes.reshape(d, d)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix()))

    def __len__(self):
        return self.amplitudes.shape[0]


def identity_vector(space: FockSpace) -> VectorizedState:
    """``|I> = sum_N |N, N>``; unnormalized, its norm is ``sqrt(dim)``."""
    return VectorizedState(space, np.eye(space.dim, dtype=np.complex128).ravel())


def vectorize(rho, space: FockSpace) -> VectorizedState:
    shape = rho.shape
    if shape != (space.dim, space.dim):
        raise FockError(f"operator of shape {shape} does not act on a space of dim {space.dim}")
    dense = rho.toarray() if sp.issparse(rho) else np.asarray(rho)
    return VectorizedState(space, dense.ravel().copy())


def devectorize(state: VectorizedState) -> SparseOperator:
    return canonical(state.matrix())


def pure_state(psi, space: FockSpace) -> VectorizedState:
    """``|psi><psi|`` as a doubled-space vector (``psi`` is not renormalized)."""
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape != (space.dim,):
        raise FockError(f"state of shape {psi.shape} does not live in dim {space.dim}")
    return VectorizedState(space, np.outer(psi, psi.conj()).ravel())


def lift(A) -> SparseOperator:
    return canonical(sp.kron(A, sp.identity(A.shape[0], dtype=np.complex128), format="csr"))


def tilde(A) -> SparseOperator:
    return canonical(sp.kron(sp.identity(A.shape[0], dtype=np.complex128), A.conj(), format="csr"))


@dataclass(frozen=True)
class Liouvillian:
    op: SparseOperator
    g: float
    kappa: float
    realization: JanusRealization
    literal: bool = False

    @property
    def space(self) -> FockSpace:
        return self.realization.space

    @property
    def dim(self) -> int:
        return self.op.shape[0]

    def restricted(self, indices) -> SparseOperator:
        """Block of ``op`` on the given doubled-space indices."""
        idx = np.asarray(indices)
        return canonical(self.op[idx][:, idx])


def _tilde_assembly(F, g: float, kappa: float, literal: bool) -> SparseOperator:
    LF, TF = lift(F), tilde(F)
    LFd, TFd = adjoint(LF), adjoint(TF)
    drive = LF - TFd + LFd - TF
    loss_right = TF @ TFd if literal else TFd @ TF
    damping = 2 * (LF @ TF) - loss_right - LFd @ LF
    return canonical(-1j * g * drive + 0.5 * kappa * damping)


def kron_liouvillian(F, g: float, kappa: float) -> SparseOperator:
    """Direct vectorization of the master equation via ``vec(A rho B) = (A x B^T) vec(rho)``."""
    d = F.shape[0]
    eye = sp.identity(d, dtype=np.complex128, format="csr")
    H = F + adjoint(F)
    FdF = adjoint(F) @ F
    left = lambda A: sp.kron(A, eye, format="csr")
    right = lambda B: sp.kron(eye, B.T, format="csr")
    drive = left(H) - right(H)
    damping = 2 * sp.kron(F, adjoint(F).T, format="csr") - left(FdF) - right(FdF)
    return canonical(-1j * g * drive + 0.5 * kappa * damping)


def max_abs_diff(A, B) -> float:
    diff = canonical(A - B)
    return float(abs(diff).max()) if diff.nnz else 0.0


def build_liouvillian(
    real: JanusRealization, g: float, kappa: float, literal: bool = False, check: bool = True
) -> Liouvillian:
    """Assemble the doubled-space generator of the Janus master equation.

    ``literal=True`` swaps the right-loss term for ``tilde(F) tilde(F)^dagger``,
    a non-trace-preserving variant kept only as a diagnostic. With ``check``
    the tilde assembly is compared entry by entry against
    :func:`kron_liouvillian`.
    """
    if not np.isfinite(g) or not np.isfinite(kappa):
        raise LiouvillianError("g and kappa must be finite")
    if kappa < 0:
        raise LiouvillianError(f"kappa must be non-negative, got {kappa}")
    op = _tilde_assembly(real.F, float(g), float(kappa), literal)
    if check and not literal:
        diff = max_abs_diff(op, kron_liouvillian(real.F, g, kappa))
        if diff > ASSEMBLY_TOL:
            raise LiouvillianError(f"tilde and Kronecker assemblies differ by {diff:.3e}")
    return Liouvillian(op, float(g), float(kappa), real, literal)


def trace_row(L: Liouvillian) -> np.ndarray:
    """``<I| op`` as a dense row."""
    I = identity_vector(L.space).amplitudes
    return np.asarray(L.op.T @ I).ravel()


def trace_form_check(L: Liouvillian) -> float:
    return float(np.max(np.abs(trace_row(L))))
