"""Liouvillian null vectors, charge sectors and the steady eigen-relations.

A steady state ``|rho>`` of the Janus master equation is expected to satisfy
``lift(F)|rho> = -(2ig/kappa)|rho>`` and ``tilde(F)|rho> = +(2ig/kappa)|rho>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .janus import JanusRealization, charge_values, sector_value
from .tfd import Liouvillian, VectorizedState, identity_vector

DENSE_LIMIT = 4096
#: singular values below this fraction of the largest count as null directions
NULL_RTOL = 1e-11
#: eigenvalues probed near zero by the sparse solver; a full count is only a lower bound
NULL_PROBE = 4


class SteadyStateError(RuntimeError):
    pass


class DegenerateNullSpace(SteadyStateError):
    def __init__(self, dim: int, at_least: bool = False):
        size = f"at least {dim}" if at_least else str(dim)
        super().__init__(f"null space has dimension {size}; pass a charge sector to select one steady state")
        self.dim = dim
        self.at_least = at_least


@dataclass(frozen=True)
class EigenResiduals:
    resid_F: float
    resid_Ftilde: float
    lambda_F_rayleigh: complex
    lambda_target: complex
    lambda_target_tilde: complex


@dataclass(frozen=True)
class SteadyStateResult:
    state: VectorizedState
    sector: Optional[object]
    method: str
    null_residual: float
    null_dim: int
    resid_F: float
    resid_Ftilde: float
    lambda_target: complex
    lambda_target_tilde: complex
    lambda_F_rayleigh: complex
    trace: complex
    herm_dev: float
    min_eig: float
    gap: Optional[float] = None


def lambda_targets(g: float, kappa: float) -> tuple[complex, complex]:
    """Target eigenvalues ``(-2ig/kappa, +2ig/kappa)`` for ``lift(F)`` and ``tilde(F)``."""
    if kappa <= 0:
        raise SteadyStateError("eigen-relations need kappa > 0")
    lam = 2j * g / kappa
    return -lam, lam


def sector_basis(real: JanusRealization, q) -> np.ndarray:
    """Doubled-space indices whose non-tilde and tilde factors both carry charge label ``q``."""
    single = single_sector(real, q)
    if single.size == 0:
        raise SteadyStateError(f"sector {q!r} is empty for cutoffs {real.space.cutoffs}")
    d = real.space.dim
    return (single[:, None] * d + single[None, :]).ravel()


def single_sector(real: JanusRealization, q) -> np.ndarray:
    """Single-copy basis indices carrying charge label ``q``."""
    target = sector_value(real, q)
    return np.flatnonzero(np.isclose(charge_values(real), target))


def eigen_residuals(state: VectorizedState, real: JanusRealization, g: float, kappa: float) -> EigenResiduals:
    from .evolution import apply_lift, apply_tilde, rayleigh

    target, target_tilde = lambda_targets(g, kappa)
    v = state.amplitudes
    norm = np.linalg.norm(v)
    if norm == 0:
        raise SteadyStateError("zero state")
    Fv = apply_lift(real.F, state)
    Ftv = apply_tilde(real.F, state)
    return EigenResiduals(
        resid_F=float(np.linalg.norm(Fv - target * v) / norm),
        resid_Ftilde=float(np.linalg.norm(Ftv - target_tilde * v) / norm),
        lambda_F_rayleigh=rayleigh(v, Fv).value,
        lambda_target=target,
        lambda_target_tilde=target_tilde,
    )


def _dense_null(A, scale: float):
    M = A.toarray()
    _, s, vh = scipy.linalg.svd(M)
    null_dim = int(np.sum(s <= NULL_RTOL * scale))
    gap = float(s[-2]) if s.size > 1 else None
    return vh[-1].conj(), max(null_dim, 1), gap


def _shift_invert(A, scale: float, tol: float, max_iter: int = 50):
    n = A.shape[0]
    # spectrum lies in Re <= 0, so a positive shift keeps 0 the nearest eigenvalue
    shift = 1e-10 * scale
    lu = spla.splu(sp.csc_matrix(A - shift * sp.identity(n, dtype=np.complex128, format="csc")))
    null_dim = 1
    if n > NULL_PROBE + 1:
        op = spla.LinearOperator((n, n), matvec=lu.solve, dtype=np.complex128)
        vals = spla.eigs(A, k=NULL_PROBE, sigma=shift, OPinv=op, v0=np.ones(n, dtype=np.complex128),
                         return_eigenvectors=False)
        null_dim = int(np.sum(np.abs(vals) <= NULL_RTOL * scale))
    x = np.ones(n, dtype=np.complex128) / np.sqrt(n)
    for _ in range(max_iter):
        x = lu.solve(x)
        x /= np.linalg.norm(x)
        if np.linalg.norm(A @ x) <= tol * scale:
            break
    else:
        raise SteadyStateError(f"inverse iteration did not converge in {max_iter} steps")
    return x, max(null_dim, 1), None


def steady_state(L: Liouvillian, sector=None, method: str = "auto", tol: float = 1e-10) -> SteadyStateResult:
    """Null vector of the Liouvillian (within ``sector`` if given), normalized to unit trace.

    ``method`` is ``dense_null`` (full SVD), ``shift_invert`` (sparse LU with
    inverse iteration) or ``auto`` (dense below 4096 unknowns).
    """
    from .evolution import physicality

    if L.kappa <= 0:
        raise SteadyStateError("kappa = 0 has no isolated steady state")
    real = L.realization
    d2 = L.dim
    idx = sector_basis(real, sector) if sector is not None else np.arange(d2)
    A = L.restricted(idx) if sector is not None else L.op
    if method == "auto":
        method = "dense_null" if A.shape[0] < DENSE_LIMIT else "shift_invert"
    scale = max(1.0, spla.norm(A, 1))
    if method == "dense_null":
        if A.shape[0] > DENSE_LIMIT:
            raise SteadyStateError(f"{A.shape[0]} unknowns is too many for the dense solver")
        x, null_dim, gap = _dense_null(A, scale)
    elif method == "shift_invert":
        x, null_dim, gap = _shift_invert(A, scale, tol)
    else:
        raise SteadyStateError(f"unknown method {method!r}")
    if null_dim > 1:
        raise DegenerateNullSpace(null_dim, at_least=method == "shift_invert" and null_dim == NULL_PROBE)

    full = np.zeros(d2, dtype=np.complex128)
    full[idx] = x
    tr = identity_vector(L.space).amplitudes @ full
    if abs(tr) < 1e-12:
        raise SteadyStateError("null vector has vanishing trace")
    state = VectorizedState(L.space, full / tr)
    v = state.amplitudes
    null_residual = float(np.linalg.norm(L.op @ v) / np.linalg.norm(v))
    res = eigen_residuals(state, real, L.g, L.kappa)
    phys = physicality(state)
    return SteadyStateResult(
        state=state,
        sector=sector,
        method=method,
        null_residual=null_residual,
        null_dim=null_dim,
        resid_F=res.resid_F,
        resid_Ftilde=res.resid_Ftilde,
        lambda_target=res.lambda_target,
        lambda_target_tilde=res.lambda_target_tilde,
        lambda_F_rayleigh=res.lambda_F_rayleigh,
        trace=phys["trace"],
        herm_dev=phys["herm_dev"],
        min_eig=phys["min_eig"],
        gap=gap,
    )
