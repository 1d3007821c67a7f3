"""Concrete Janus-faced operator pairs ``F`` with conjugates ``G_i^dagger``.

Each realization satisfies ``[F, G_i^dagger] = 1`` away from the truncation
edge (checked numerically by :func:`commutator_residual`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fock import (
    FockError,
    FockSpace,
    SparseOperator,
    adjoint,
    canonical,
    commutator,
    diagonal_op,
    identity,
    ladder_op,
    number_function,
    number_op,
    product,
)

KINDS = ("pair_ab", "square_a2", "single_beta", "pair_beta")
PAIR_KINDS = ("pair_ab", "pair_beta")

#: occupation change produced by F, used as the default interior margin
DEFAULT_MARGIN = 2


class JanusError(ValueError):
    pass


@dataclass(frozen=True)
class JanusConfig:
    kind: str
    space: FockSpace
    beta: complex = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise JanusError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        need = 2 if self.kind in PAIR_KINDS else 1
        if self.space.mode_count < need:
            raise JanusError(f"{self.kind} needs at least {need} modes")


@dataclass(frozen=True)
class JanusRealization:
    kind: str
    space: FockSpace
    F: SparseOperator
    G_daggers: tuple[SparseOperator, ...]
    charge: Optional[SparseOperator]
    beta: complex = 0.0

    @property
    def charge_kind(self) -> Optional[str]:
        if self.kind in PAIR_KINDS:
            return "difference"
        if self.kind == "square_a2":
            return "parity"
        return None


def build_pair(config: JanusConfig) -> JanusRealization:
    space, beta = config.space, complex(config.beta)
    a = ladder_op(space, 0, "lower")
    ad = adjoint(a)
    inv_plus = lambda mode, c: number_function(space, mode, lambda n: 1.0 / (n + c))

    if config.kind in PAIR_KINDS:
        b = ladder_op(space, 1, "lower")
        bd = adjoint(b)
        ab, adbd = product(a, b), product(ad, bd)
        # the diagonal factor acts first; this ordering makes [ab, G^dagger] = 1
        if config.kind == "pair_ab":
            F = ab
            G = (product(adbd, inv_plus(1, 1)), product(adbd, inv_plus(0, 1)))
        else:
            F = canonical(ab + beta * adbd)
            G = (
                canonical(0.5 * product(adbd, inv_plus(1, 1))),
                canonical(0.5 * product(adbd, inv_plus(0, 1))),
            )
        charge = canonical(number_op(space, 0) - number_op(space, 1))
    else:
        a2 = product(a, a)
        ad2 = product(ad, ad)
        G = (
            canonical(0.5 * product(ad2, inv_plus(0, 1))),
            canonical(0.5 * product(ad2, inv_plus(0, 2))),
        )
        if config.kind == "square_a2":
            F = a2
            parity = (-1.0) ** space.occupation_table()[:, 0]
            charge = diagonal_op(parity)
        else:
            F = canonical(a + beta * ad2)
            charge = None
    return JanusRealization(config.kind, space, canonical(F), G, charge, beta)


def _interior_max_norm(op, space: FockSpace, margin: int, within=None) -> float:
    if margin < 0:
        raise JanusError("margin must be non-negative")
    cols = space.interior(margin)
    if within is not None:
        cols = np.intersect1d(cols, within)
    if cols.size == 0:
        raise JanusError(f"interior subspace at margin {margin} is empty for cutoffs {space.cutoffs}")
    block = op.tocsc()[:, cols]
    norms = np.sqrt(np.asarray(abs(block).power(2).sum(axis=0))).ravel()
    return float(norms.max()) if norms.size else 0.0


def conjugate_domain(real: JanusRealization, which: int) -> np.ndarray:
    """Basis indices of the sector on which ``G_which^dagger`` is the conjugate of F.

    Each conjugate belongs to its own vacuum family: for the one-mode kinds
    ``G_0`` lives on even and ``G_1`` on odd occupations; for the pair kinds
    the ``1/(n_b+1)`` conjugate needs ``n_a <= n_b`` and the ``1/(n_a+1)``
    conjugate ``n_a >= n_b``.
    """
    if which not in (0, 1):
        raise JanusError(f"{real.kind} has 2 conjugates, not {which + 1}")
    occ = real.space.occupation_table()
    if real.kind in PAIR_KINDS:
        q = occ[:, 0] - occ[:, 1]
        mask = q <= 0 if which == 0 else q >= 0
    else:
        mask = occ[:, 0] % 2 == which
    return np.flatnonzero(mask)


def commutator_residual(
    real: JanusRealization, which: int = 0, margin: int = DEFAULT_MARGIN, restrict: bool = True
) -> float:
    """Largest ``||([F, G_which^dagger] - 1)|n>||`` over interior basis states.

    With ``restrict`` (the default) only interior states inside
    :func:`conjugate_domain` are checked; ``restrict=False`` scans the whole
    interior, where the identity fails on the neighbouring sectors.
    """
    try:
        G = real.G_daggers[which]
    except IndexError:
        raise JanusError(f"{real.kind} has {len(real.G_daggers)} conjugates, not {which + 1}") from None
    defect = commutator(real.F, G) - identity(real.space)
    cols = conjugate_domain(real, which) if restrict else None
    return _interior_max_norm(defect, real.space, margin, cols)


def ff_dagger_norm(real: JanusRealization, margin: int = DEFAULT_MARGIN) -> float:
    """Interior size of ``[F, F^dagger]``; zero would mean F is normal."""
    return _interior_max_norm(commutator(real.F, adjoint(real.F)), real.space, margin)


def charge_commutator_norm(real: JanusRealization) -> Optional[float]:
    """Largest entry of ``[F, Q]`` over the full truncated space (None without a charge)."""
    if real.charge is None:
        return None
    c = commutator(real.F, real.charge)
    return float(abs(c).max()) if c.nnz else 0.0


def charge_values(real: JanusRealization) -> np.ndarray:
    if real.charge is None:
        raise JanusError(f"{real.kind} has no conserved charge")
    return np.real(real.charge.diagonal())


def sector_value(real: JanusRealization, q) -> float:
    """Map a sector label to the charge eigenvalue it selects."""
    if real.charge_kind == "parity":
        labels = {"even": 1.0, 0: 1.0, "odd": -1.0, 1: -1.0}
        if q not in labels:
            raise JanusError(f"parity sector must be even/odd (or 0/1), got {q!r}")
        return labels[q]
    if real.charge_kind == "difference":
        if isinstance(q, str) or int(q) != q:
            raise JanusError(f"charge sector must be an integer, got {q!r}")
        return float(q)
    raise JanusError(f"{real.kind} has no conserved charge")


__all__ = [
    "KINDS",
    "FockError",
    "JanusConfig",
    "JanusError",
    "JanusRealization",
    "build_pair",
    "charge_commutator_norm",
    "charge_values",
    "commutator_residual",
    "conjugate_domain",
    "ff_dagger_norm",
    "sector_value",
]
