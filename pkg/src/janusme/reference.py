"""Analytic benchmark states in truncated Fock spaces and fidelities against them."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, iv

from .fock import FockError, FockSpace
from .tfd import VectorizedState

#: largest tolerated norm deficit caused by truncation
LOSS_BOUND = 1e-8

HERMITIAN_TOL = 1e-8


class ReferenceStateError(ValueError):
    pass


@dataclass(frozen=True)
class ReferenceState:
    kind: str
    params: dict
    vector: np.ndarray
    truncation_loss: float
    space: FockSpace = field(repr=False, default=None)


def _finish(kind, params, space, amps, total, loss_bound) -> ReferenceState:
    kept = float(np.sum(np.abs(amps) ** 2))
    loss = max(0.0, 1.0 - kept / total) if total > 0 else 0.0
    if loss > loss_bound:
        raise ReferenceStateError(f"{kind}: truncation loss {loss:.3e} exceeds {loss_bound:.1e}")
    return ReferenceState(kind, params, amps / np.sqrt(kept), loss, space)


def _log_power(z: complex, n: np.ndarray) -> np.ndarray:
    """``z**n`` elementwise with ``0**0 = 1``."""
    return np.power(complex(z), n.astype(float) + 0j) if z != 0 else (n == 0).astype(complex)


def pair_coherent(space: FockSpace, zeta: complex, q: int = 0, loss_bound: float = LOSS_BOUND) -> ReferenceState:
    """Simultaneous eigenstate of ``ab`` (eigenvalue ``zeta``) and ``n_a - n_b`` (value ``q``).

    Amplitudes ``zeta**n / sqrt(n! (n+|q|)!)`` on ``|n+q, n>`` (``|n, n-q>`` when
    ``q < 0``). The untruncated norm is ``|zeta|**-|q| I_|q|(2|zeta|)``.
    """
    if space.mode_count != 2:
        raise ReferenceStateError("pair coherent states need a two-mode space")
    q = int(q)
    p = abs(q)
    if p >= min(space.cutoffs):
        raise ReferenceStateError(f"charge |q|={p} must be below {min(space.cutoffs)}")
    shift = (q, 0) if q >= 0 else (0, p)
    n = np.arange(min(space.cutoffs[0] - shift[0], space.cutoffs[1] - shift[1]))
    log_mag = -0.5 * (gammaln(n + 1) + gammaln(n + p + 1))
    coeff = _log_power(zeta, n) * np.exp(log_mag)
    amps = np.zeros(space.dim, dtype=np.complex128)
    amps[[space.index((k + shift[0], k + shift[1])) for k in n]] = coeff
    r = abs(zeta)
    total = np.exp(-gammaln(p + 1)) if r == 0 else iv(p, 2 * r) / r**p
    return _finish("pair_coherent", {"zeta": complex(zeta), "q": q}, space, amps, total, loss_bound)


def two_mode_squeezed(space: FockSpace, r: float, phase: float = 0.0, loss_bound: float = LOSS_BOUND) -> ReferenceState:
    """``exp(-i r (ab + a^dagger b^dagger))|0,0>`` for ``phase=0``.

    Amplitudes ``sech r (-i e^{i phase} tanh r)**n`` on ``|n, n>``.
    """
    if space.mode_count != 2:
        raise ReferenceStateError("two-mode squeezing needs a two-mode space")
    n = np.arange(min(space.cutoffs))
    coeff = _log_power(-1j * np.exp(1j * phase) * np.tanh(r), n) / np.cosh(r)
    amps = np.zeros(space.dim, dtype=np.complex128)
    amps[[space.index((k, k)) for k in n]] = coeff
    return _finish("tmss", {"r": float(r), "phase": float(phase)}, space, amps, 1.0, loss_bound)


def squeezed_vacuum(space: FockSpace, r: float, phase: float = 0.0, loss_bound: float = LOSS_BOUND) -> ReferenceState:
    """Single-mode squeezed vacuum; ``phase=0`` with ``r = 2 g t`` is ``exp(-i g t (a^2 + a^dagger^2))|0>``.

    Amplitudes ``(-i e^{i phase} tanh r)**k sqrt((2k)!) / (2**k k! sqrt(cosh r))`` on ``|2k>``.
    """
    k = np.arange((space.cutoffs[0] + 1) // 2)
    log_mag = 0.5 * gammaln(2 * k + 1) - k * np.log(2.0) - gammaln(k + 1)
    coeff = _log_power(-1j * np.exp(1j * phase) * np.tanh(r), k) * np.exp(log_mag) / np.sqrt(np.cosh(r))
    return _finish("squeezed_vac", {"r": float(r), "phase": float(phase)}, space,
                   _single_mode(space, 2 * k, coeff), 1.0, loss_bound)


def cat_state(space: FockSpace, alpha: complex, parity: str = "even", loss_bound: float = LOSS_BOUND) -> ReferenceState:
    """``N(|alpha> +- |-alpha>)``, an eigenstate of ``a^2`` with eigenvalue ``alpha**2``.

    Amplitudes are taken as ``alpha**(n-p) / sqrt(n!)`` on levels of parity
    ``p`` so that the ``alpha -> 0`` limits (``|0>`` and ``|1>``) are exact.
    """
    if parity not in ("even", "odd"):
        raise ReferenceStateError(f"parity must be 'even' or 'odd', got {parity!r}")
    p = 0 if parity == "even" else 1
    n = np.arange(p, space.cutoffs[0], 2)
    coeff = _log_power(alpha, n - p) * np.exp(-0.5 * gammaln(n + 1))
    x = abs(alpha) ** 2
    if x == 0:
        total = 1.0
    else:
        total = (np.cosh(x) if p == 0 else np.sinh(x)) / x**p
    return _finish("cat", {"alpha": complex(alpha), "parity": parity}, space,
                   _single_mode(space, n, coeff), total, loss_bound)


def _single_mode(space: FockSpace, levels, coeff) -> np.ndarray:
    if space.mode_count != 1:
        raise ReferenceStateError("single-mode reference states need a one-mode space")
    amps = np.zeros(space.dim, dtype=np.complex128)
    keep = levels < space.cutoffs[0]
    amps[levels[keep]] = coeff[keep]
    return amps


def cat_alpha(g: float, kappa: float) -> complex:
    """Principal square root of the steady ``a^2`` eigenvalue ``-2 i g / kappa``."""
    return complex(np.sqrt(-2j * g / kappa))


def fidelity(rho: VectorizedState, ref) -> float:
    """``<psi|rho|psi>`` for a pure reference ``psi`` (ReferenceState or raw vector)."""
    psi = ref.vector if isinstance(ref, ReferenceState) else np.asarray(ref, dtype=np.complex128)
    mat = rho.matrix()
    if psi.shape[0] != mat.shape[0]:
        raise FockError(f"reference of dim {psi.shape[0]} vs state of dim {mat.shape[0]}")
    dev = np.linalg.norm(mat - mat.conj().T)
    if dev > HERMITIAN_TOL * max(1.0, np.linalg.norm(mat)):
        raise ReferenceStateError(f"state is not Hermitian (deviation {dev:.3e})")
    return float(np.real(np.vdot(psi, mat @ psi)))
