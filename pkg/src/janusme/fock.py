"""Truncated bosonic Fock spaces and sparse operator algebra.

Operators are plain ``scipy.sparse.csr_matrix`` objects with complex128
entries; states are 1-D complex numpy arrays. Every builder returns a
canonical matrix (duplicates summed, sorted indices, zeros dropped).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

SparseOperator = sp.csr_matrix

#: default ceiling on the single-copy dimension (doubled space is its square)
MAX_DIM = 1 << 14

_TINY = 1e-300


class FockError(ValueError):
    """Raised on invalid spaces, modes or dimension mismatches."""


@dataclass(frozen=True)
class FockSpace:
    """Product of truncated oscillators; mode ``m`` holds levels ``0..cutoffs[m]-1``.

    Basis states are ordered row-major in the occupation multi-index, so the
    last mode varies fastest.
    """

    cutoffs: tuple[int, ...]
    dim: int = field(init=False)
    mode_count: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "cutoffs", tuple(int(c) for c in self.cutoffs))
        object.__setattr__(self, "dim", int(np.prod(self.cutoffs)))
        object.__setattr__(self, "mode_count", len(self.cutoffs))

    def index(self, occupations: Sequence[int]) -> int:
        if len(occupations) != self.mode_count:
            raise FockError(f"expected {self.mode_count} occupations, got {len(occupations)}")
        for n, c in zip(occupations, self.cutoffs):
            if not 0 <= n < c:
                raise FockError(f"occupation {n} outside 0..{c - 1}")
        return int(np.ravel_multi_index(tuple(occupations), self.cutoffs))

    def occupations(self, index: int) -> tuple[int, ...]:
        return tuple(int(n) for n in np.unravel_index(index, self.cutoffs))

    def occupation_table(self) -> np.ndarray:
        """(dim, mode_count) integer array; row ``i`` is the multi-index of basis state ``i``."""
        grids = np.indices(self.cutoffs).reshape(self.mode_count, -1)
        return grids.T.copy()

    def interior(self, margin: int) -> np.ndarray:
        """Indices of basis states with every occupation ``<= cutoff - 1 - margin``."""
        occ = self.occupation_table()
        limit = np.asarray(self.cutoffs) - 1 - margin
        return np.flatnonzero(np.all(occ <= limit, axis=1))


def make_space(cutoffs: Sequence[int], max_dim: int = MAX_DIM) -> FockSpace:
    cutoffs = [int(c) for c in cutoffs]
    if not cutoffs:
        raise FockError("at least one mode is required")
    if any(c < 2 for c in cutoffs):
        raise FockError(f"every cutoff must be >= 2, got {cutoffs}")
    dim = 1
    for c in cutoffs:
        dim *= c
    if dim > max_dim:
        raise FockError(f"dimension {dim} exceeds the configured bound {max_dim}")
    return FockSpace(tuple(cutoffs))


def canonical(op) -> SparseOperator:
    """Return ``op`` as a complex CSR matrix with summed duplicates and no negligible entries."""
    out = sp.csr_matrix(op, dtype=np.complex128, copy=True)
    out.sum_duplicates()
    out.data[np.abs(out.data) < _TINY] = 0
    out.eliminate_zeros()
    out.sort_indices()
    return out


def identity(space: FockSpace) -> SparseOperator:
    return canonical(sp.identity(space.dim, dtype=np.complex128, format="csr"))


def _embed(space: FockSpace, mode: int, local) -> SparseOperator:
    out = sp.identity(1, dtype=np.complex128, format="csr")
    for m, c in enumerate(space.cutoffs):
        factor = local if m == mode else sp.identity(c, dtype=np.complex128)
        out = sp.kron(out, factor, format="csr")
    return canonical(out)


def _check_mode(space: FockSpace, mode: int) -> None:
    if not 0 <= mode < space.mode_count:
        raise FockError(f"mode {mode} invalid for a {space.mode_count}-mode space")


def ladder_op(space: FockSpace, mode: int, kind: str = "lower") -> SparseOperator:
    """Annihilation (``kind='lower'``) or creation (``'raise'``) operator on one mode.

    The creation operator is the adjoint of the truncated annihilator, so the
    top level is mapped to zero.
    """
    _check_mode(space, mode)
    n = space.cutoffs[mode]
    local = sp.diags(np.sqrt(np.arange(1, n, dtype=float)), 1, shape=(n, n))
    op = _embed(space, mode, local)
    if kind == "lower":
        return op
    if kind == "raise":
        return adjoint(op)
    raise FockError(f"unknown ladder kind {kind!r}")


def number_op(space: FockSpace, mode: int) -> SparseOperator:
    _check_mode(space, mode)
    return diagonal_op(space.occupation_table()[:, mode].astype(float))


def diagonal_op(values) -> SparseOperator:
    values = np.asarray(values, dtype=np.complex128)
    return canonical(sp.diags(values, 0, format="csr"))


def number_function(space: FockSpace, mode: int, func) -> SparseOperator:
    """Diagonal operator ``func(n_mode)`` evaluated on the occupation numbers."""
    _check_mode(space, mode)
    n = space.occupation_table()[:, mode].astype(float)
    return diagonal_op(func(n))


def adjoint(op) -> SparseOperator:
    return canonical(sp.csr_matrix(op).conj().T)


def _conformable(A, B) -> None:
    if A.shape[1] != B.shape[0] or A.shape != B.shape:
        raise FockError(f"dimension mismatch {A.shape} vs {B.shape}")


def op_algebra(A, B, kind: str = "product", scalar: complex = 1.0) -> SparseOperator:
    """``scalar * AB``, ``A + scalar * B`` or ``scalar * (AB - BA)``."""
    _conformable(A, B)
    if kind == "product":
        out = scalar * (A @ B)
    elif kind == "sum":
        out = A + scalar * B
    elif kind == "commutator":
        out = scalar * (A @ B - B @ A)
    else:
        raise FockError(f"unknown algebra kind {kind!r}")
    return canonical(out)


def product(*ops) -> SparseOperator:
    out = ops[0]
    for op in ops[1:]:
        out = op_algebra(out, op, "product")
    return out


def commutator(A, B) -> SparseOperator:
    return op_algebra(A, B, "commutator")


def apply(op, psi) -> np.ndarray:
    psi = np.asarray(psi)
    if psi.ndim != 1 or op.shape[1] != psi.shape[0]:
        raise FockError(f"cannot apply {op.shape} operator to state of shape {psi.shape}")
    return np.asarray(op @ psi, dtype=np.complex128)


def basis_state(space: FockSpace, occupations: Sequence[int]) -> np.ndarray:
    psi = np.zeros(space.dim, dtype=np.complex128)
    psi[space.index(occupations)] = 1.0
    return psi


def vacuum(space: FockSpace) -> np.ndarray:
    return basis_state(space, [0] * space.mode_count)


def normalized(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128)
    norm = np.linalg.norm(psi)
    if not np.isfinite(norm) or norm == 0:
        raise FockError("cannot normalize a zero or non-finite state")
    return psi / norm


def same_operator(A, B) -> bool:
    """Exact equality of canonical entry lists."""
    A, B = canonical(A), canonical(B)
    return (
        A.shape == B.shape
        and np.array_equal(A.indptr, B.indptr)
        and np.array_equal(A.indices, B.indices)
        and np.array_equal(A.data, B.data)
    )
