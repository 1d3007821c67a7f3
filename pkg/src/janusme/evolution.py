"""Time propagation of vectorized density matrices under a Liouvillian."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

from .fock import adjoint
from .janus import JanusRealization
from .reference import ReferenceState, fidelity
from .tfd import Liouvillian, VectorizedState, build_liouvillian

log = logging.getLogger(__name__)

DENSE_ORACLE_LIMIT = 4096
#: largest single-copy dimension for which every sample gets a dense eigenvalue check
EIG_LIMIT = 4096
PHYSICAL_TOL = 1e-10
LEAK_WARN = 1e-6
#: local error control is tighter than the requested tolerance so that the
#: accumulated error over a run stays within a small multiple of it
LOCAL_RTOL_FACTOR = 1e-2
LOCAL_ATOL_FACTOR = 1e-4

ReferenceSpec = Union[None, ReferenceState, Callable[[float], ReferenceState]]


class EvolutionError(RuntimeError):
    pass


class NonPhysicalState(EvolutionError, ValueError):
    pass


class StepUnderflow(EvolutionError):
    def __init__(self, t: float, message: str):
        super().__init__(f"integration failed at t={t:.17g}: {message}")
        self.t = t


@dataclass
class Trajectory:
    times: np.ndarray
    states: list
    observables: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> VectorizedState:
        return self.states[-1]


def apply_lift(A, state: VectorizedState) -> np.ndarray:
    """``lift(A)|rho>`` computed as ``vec(A rho)``."""
    return np.asarray(A @ state.matrix()).ravel()


def apply_tilde(A, state: VectorizedState) -> np.ndarray:
    """``tilde(A)|rho>`` computed as ``vec(rho A^dagger)``."""
    Ad = adjoint(A)
    return np.asarray((Ad.T @ state.matrix().T).T).ravel()


def physicality(state: VectorizedState, eig_limit: int = EIG_LIMIT) -> dict:
    rho = state.matrix()
    herm = rho - rho.conj().T
    out = {
        "trace": complex(np.trace(rho)),
        "herm_dev": float(np.linalg.norm(herm)),
        "min_eig": float("nan"),
    }
    if rho.shape[0] <= eig_limit:
        out["min_eig"] = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    return out


def mode_populations(state: VectorizedState) -> np.ndarray:
    """(mode_count, max cutoff) array of single-mode level populations."""
    space = state.space
    diag = np.real(np.diagonal(state.matrix()))
    occ = space.occupation_table()
    out = np.zeros((space.mode_count, max(space.cutoffs)))
    for m in range(space.mode_count):
        out[m, : space.cutoffs[m]] = np.bincount(occ[:, m], weights=diag, minlength=space.cutoffs[m])
    return out


def truncation_leak(state: VectorizedState) -> float:
    """Largest population held by the top two levels of any mode."""
    pops = mode_populations(state)
    return float(max(pops[m, c - 2 : c].sum() for m, c in enumerate(state.space.cutoffs)))


def check_physical(state: VectorizedState, tol: float = PHYSICAL_TOL) -> None:
    p = physicality(state)
    problems = []
    if abs(p["trace"] - 1) > tol:
        problems.append(f"trace {p['trace']:.12g}")
    if p["herm_dev"] > tol:
        problems.append(f"hermiticity deviation {p['herm_dev']:.3e}")
    if np.isfinite(p["min_eig"]) and p["min_eig"] < -tol:
        problems.append(f"negative eigenvalue {p['min_eig']:.3e}")
    if problems:
        raise NonPhysicalState("initial state is not a density matrix: " + ", ".join(problems))


def sample_observables(state: VectorizedState, L: Liouvillian, ref: Optional[ReferenceState]) -> dict:
    obs = physicality(state)
    pops = mode_populations(state)
    obs["mean_n"] = [float(pops[m] @ np.arange(pops.shape[1])) for m in range(state.space.mode_count)]
    obs["leak"] = truncation_leak(state)
    obs["fidelity_ref"] = fidelity(state, ref) if ref is not None else None
    obs["resid_F"] = obs["resid_Ftilde"] = None
    if L.kappa > 0:
        from .steady import eigen_residuals

        res = eigen_residuals(state, L.realization, L.g, L.kappa)
        obs["resid_F"], obs["resid_Ftilde"] = res.resid_F, res.resid_Ftilde
    return obs


def _resolve_reference(reference: ReferenceSpec, t: float) -> Optional[ReferenceState]:
    if reference is None or isinstance(reference, ReferenceState):
        return reference
    return reference(t)


def _check_grid(t_grid) -> np.ndarray:
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or times.size < 1 or times[0] != 0:
        raise EvolutionError("t_grid must be a 1-D sequence starting at 0")
    if np.any(np.diff(times) <= 0):
        raise EvolutionError("t_grid must be strictly increasing")
    return times


def propagate(L: Liouvillian, rho0: VectorizedState, t_grid, tol: float = 1e-10,
              sector=None, max_step: float = np.inf) -> list:
    """Vectorized states at ``t_grid`` from an adaptive 8(5,3) Runge-Kutta integration.

    ``sector`` restricts the integration to a set of doubled-space indices
    that the dynamics leaves invariant; ``rho0`` must vanish outside it.
    """
    times = _check_grid(t_grid)
    y0 = rho0.amplitudes
    A = L.op
    if sector is not None:
        idx = np.asarray(sector)
        outside = np.delete(y0, idx)
        if outside.size and np.max(np.abs(outside)) > 1e-14:
            raise EvolutionError("initial state has weight outside the requested sector")
        A, y0 = L.restricted(idx), y0[idx]
    if times.size == 1:
        return [rho0]

    last_t = [0.0]

    def rhs(t, y):
        last_t[0] = t
        return A @ y

    sol = solve_ivp(rhs, (0.0, times[-1]), y0, method="DOP853", t_eval=times,
                    rtol=tol * LOCAL_RTOL_FACTOR, atol=tol * LOCAL_ATOL_FACTOR, max_step=max_step)
    if sol.status != 0:
        raise StepUnderflow(last_t[0], sol.message)
    states = []
    for k in range(times.size):
        y = sol.y[:, k]
        if sector is not None:
            full = np.zeros(L.dim, dtype=np.complex128)
            full[idx] = y
            y = full
        states.append(VectorizedState(L.space, y))
    return states


def evolve(L: Liouvillian, rho0: VectorizedState, t_grid: Sequence[float], tol: float = 1e-10,
           sector=None, reference: ReferenceSpec = None, max_step: float = np.inf,
           leak_warn: float = LEAK_WARN) -> Trajectory:
    """Integrate ``d|rho>/dt = op |rho>`` and record observables at every grid time."""
    check_physical(rho0)
    times = _check_grid(t_grid)
    states = propagate(L, rho0, times, tol, sector, max_step)
    samples = [sample_observables(s, L, _resolve_reference(reference, t)) for s, t in zip(states, times)]
    observables = {key: [s[key] for s in samples] for key in samples[0]}
    traj = Trajectory(times, states, observables)
    worst = max(observables["leak"])
    if worst > leak_warn:
        msg = f"truncation leak {worst:.3e} exceeds {leak_warn:.1e}; raise the cutoffs"
        log.warning(msg)
        traj.warnings.append(msg)
    return traj


def expm_oracle(L: Liouvillian, t: float, rho0: VectorizedState, sector=None) -> VectorizedState:
    """Dense matrix exponential reference; only for doubled dimension <= 4096.

    With ``sector`` the exponential is taken of the invariant block on those
    doubled-space indices, which is exact when ``rho0`` is supported there.
    """
    y0 = rho0.amplitudes
    A = L.op
    if sector is not None:
        idx = np.asarray(sector)
        if np.max(np.abs(np.delete(y0, idx)), initial=0.0) > 1e-14:
            raise EvolutionError("initial state has weight outside the requested sector")
        A, y0 = L.restricted(idx), y0[idx]
    if A.shape[0] > DENSE_ORACLE_LIMIT:
        raise EvolutionError(f"doubled dimension {A.shape[0]} too large for the dense oracle")
    if t == 0:
        return VectorizedState(L.space, rho0.amplitudes.copy())
    y = scipy.linalg.expm(t * A.toarray()) @ y0
    if sector is not None:
        full = np.zeros(L.dim, dtype=np.complex128)
        full[idx] = y
        y = full
    return VectorizedState(L.space, y)


def short_term_state(real: JanusRealization, g: float, t: float, rho0: VectorizedState,
                     tol: float = 1e-10, sector=None) -> VectorizedState:
    """Pure-drive (kappa = 0) propagation of ``rho0`` to time ``t``."""
    check_physical(rho0)
    if t == 0:
        return rho0
    L = build_liouvillian(real, g, 0.0)
    return propagate(L, rho0, [0.0, t], tol, sector)[-1]


@dataclass(frozen=True)
class EigenCheck:
    value: complex
    residual: float


def rayleigh(vec: np.ndarray, image: np.ndarray) -> EigenCheck:
    norm2 = np.vdot(vec, vec).real
    if norm2 == 0:
        raise EvolutionError("zero state has no eigenvalue")
    lam = np.vdot(vec, image) / norm2
    return EigenCheck(complex(lam), float(np.linalg.norm(image - lam * vec) / np.sqrt(norm2)))


def verify_G_eigenstate(state: VectorizedState, real: JanusRealization, which: int = 0) -> dict:
    """Eigenvalue and residual of ``G = (G_which^dagger)^dagger`` on both copies.

    Returns ``{"lift": EigenCheck, "tilde": EigenCheck}``.
    """
    G = adjoint(real.G_daggers[which])
    v = state.amplitudes
    return {
        "lift": rayleigh(v, apply_lift(G, state)),
        "tilde": rayleigh(v, apply_tilde(G, state)),
    }
