"""Scenario pipelines and the files they write (trajectory.csv, steady.json, verify.json)."""

from __future__ import annotations

import csv
import json
import logging
import math
from pathlib import Path
from typing import Optional

import numpy as np

from .evolution import DENSE_ORACLE_LIMIT, evolve, expm_oracle, truncation_leak
from .fock import adjoint, basis_state, ladder_op, make_space
from .janus import (
    JanusConfig,
    build_pair,
    charge_commutator_norm,
    commutator_residual,
    ff_dagger_norm,
)
from .reference import (
    cat_alpha,
    cat_state,
    fidelity,
    pair_coherent,
    squeezed_vacuum,
    two_mode_squeezed,
)
from .scenario import Scenario
from .steady import DegenerateNullSpace, sector_basis, steady_state
from .tfd import (
    build_liouvillian,
    identity_vector,
    kron_liouvillian,
    lift,
    max_abs_diff,
    pure_state,
    tilde,
    trace_form_check,
)

log = logging.getLogger(__name__)

CSV_HEADER = [
    "t", "trace_re", "trace_im", "herm_dev", "min_eig", "n_a", "n_b", "leak",
    "fidelity_ref", "resid_F", "resid_Ftilde",
]

TFD_TOL = 1e-13
ASSEMBLY_TOL = 1e-13
TRACE_FORM_TOL = 1e-12
CONTRACT_TOL = 1e-12
TRAJ_TRACE_TOL = 1e-9
TRAJ_HERM_TOL = 1e-9
MIN_EIG_TOL = -1e-8
NULL_TOL = 1e-8
STEADY_TRACE_TOL = 1e-10
STEADY_HERM_TOL = 1e-8
EIGEN_RELATION_TOL = 1e-5

#: kinds whose conjugates are held to the commutation contract
CONTRACT_KINDS = ("pair_ab", "square_a2")


def fmt(x) -> str:
    """17 significant digits; empty for missing values."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return format(float(x), ".17g")


def cpx(z) -> list:
    z = complex(z)
    return [z.real + 0.0, z.imag + 0.0]


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, complex):
        return cpx(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return None if not math.isfinite(x) else x + 0.0
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(_clean(payload), indent=2, sort_keys=True) + "\n")


def realization_for(sc: Scenario):
    space = make_space(sc.cutoffs)
    return build_pair(JanusConfig(sc.kind, space, sc.beta))


def _reference_state(params: dict, space):
    kind = params["type"]
    if kind == "pair_coherent":
        return pair_coherent(space, params.get("zeta", 0), params.get("q", 0))
    if kind == "tmss":
        return two_mode_squeezed(space, params.get("r", 0.0), params.get("phase", 0.0))
    if kind == "squeezed_vac":
        return squeezed_vacuum(space, params.get("r", 0.0), params.get("phase", 0.0))
    return cat_state(space, params.get("alpha", 0), params.get("parity", "even"))


def trajectory_reference(sc: Scenario, space):
    """Reference for the fidelity column: the configured state, or the analytic
    squeezed state when a pair_ab/square_a2 run starts from vacuum without loss."""
    if sc.reference is not None:
        return _reference_state(sc.reference, space)
    vacuum_start = not any(sc.initial_occupations)
    if sc.kappa == 0 and vacuum_start:
        if sc.kind == "pair_ab":
            return lambda t: two_mode_squeezed(space, sc.g * t, loss_bound=1.0)
        if sc.kind == "square_a2":
            return lambda t: squeezed_vacuum(space, 2 * sc.g * t, loss_bound=1.0)
    return None


def verify(sc: Scenario) -> dict:
    """Operator identities for the scenario's realization and Liouvillian."""
    real = realization_for(sc)
    space = real.space
    I = identity_vector(space).amplitudes
    tfd_residual = 0.0
    for mode in range(space.mode_count):
        a = ladder_op(space, mode)
        tfd_residual = max(
            tfd_residual,
            float(np.max(np.abs(lift(a) @ I - adjoint(tilde(a)) @ I))),
            float(np.max(np.abs(adjoint(lift(a)) @ I - tilde(a) @ I))),
        )
    L = build_liouvillian(real, sc.g, sc.kappa, check=False)
    kron_diff = max_abs_diff(L.op, kron_liouvillian(real.F, sc.g, sc.kappa))
    trace_form = trace_form_check(L)
    literal = trace_form_check(build_liouvillian(real, sc.g, sc.kappa, literal=True))

    contract = {}
    for which in range(len(real.G_daggers)):
        contract[f"G{which}"] = {
            "residual": commutator_residual(real, which, 2),
            "residual_full_interior": commutator_residual(real, which, 2, restrict=False),
            "residual_margin0": commutator_residual(real, which, 0),
        }
    charge_norm = charge_commutator_norm(real)
    checks = {
        "tfd_identity": tfd_residual <= TFD_TOL,
        "kron_equivalence": kron_diff <= ASSEMBLY_TOL,
        "trace_form": trace_form <= TRACE_FORM_TOL,
    }
    if sc.kind in CONTRACT_KINDS:
        checks["janus_contract"] = all(c["residual"] <= CONTRACT_TOL for c in contract.values())
    if charge_norm is not None:
        checks["charge_conserved"] = charge_norm == 0.0
    return {
        "kind": sc.kind,
        "beta": sc.beta,
        "cutoffs": list(sc.cutoffs),
        "tfd_identity_residual": tfd_residual,
        "kron_equivalence_max_diff": kron_diff,
        "trace_form_residual": trace_form,
        "trace_form_literal_ordering": literal,
        "commutator_residuals": contract,
        "ff_dagger_commutator_norm": ff_dagger_norm(real),
        "charge_commutator_norm": charge_norm,
        "checks": checks,
        "ok": all(checks.values()),
    }


def evolve_scenario(sc: Scenario, dense_oracle: bool = False):
    """Trajectory for the scenario plus the hard-invariant verdict."""
    real = realization_for(sc)
    space = real.space
    L = build_liouvillian(real, sc.g, sc.kappa)
    psi0 = basis_state(space, sc.initial_occupations)
    rho0 = pure_state(psi0, space)
    sector = None
    if real.charge is not None:
        # a Fock initial state lies in one charge sector, which the dynamics preserves
        q = real.charge.diagonal()[space.index(sc.initial_occupations)].real
        label = int(round(q)) if real.charge_kind == "difference" else ("even" if q > 0 else "odd")
        sector = sector_basis(real, label)
    traj = evolve(L, rho0, sc.times(), sc.tol, sector=sector,
                  reference=trajectory_reference(sc, space), max_step=sc.max_step)
    obs = traj.observables
    checks = {
        "trace": all(abs(t - 1) <= TRAJ_TRACE_TOL for t in obs["trace"]),
        "hermiticity": all(h <= TRAJ_HERM_TOL for h in obs["herm_dev"]),
        "positivity": all(not (e < MIN_EIG_TOL) for e in obs["min_eig"]),
    }
    oracle = None
    if dense_oracle and L.dim <= DENSE_ORACLE_LIMIT:
        diffs = [
            float(np.linalg.norm(s.amplitudes - expm_oracle(L, t, rho0).amplitudes))
            for s, t in zip(traj.states, traj.times)
        ]
        oracle = {"max_frobenius_diff": max(diffs), "bound": 10 * sc.tol}
        checks["dense_oracle"] = max(diffs) <= 10 * sc.tol
    return traj, checks, oracle


def write_trajectory(path: Path, traj) -> None:
    obs = traj.observables
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for k, t in enumerate(traj.times):
            mean_n = obs["mean_n"][k]
            writer.writerow([
                fmt(t),
                fmt(obs["trace"][k].real),
                fmt(obs["trace"][k].imag),
                fmt(obs["herm_dev"][k]),
                fmt(obs["min_eig"][k]),
                fmt(mean_n[0]),
                fmt(mean_n[1]) if len(mean_n) > 1 else "",
                fmt(obs["leak"][k]),
                fmt(obs["fidelity_ref"][k]),
                fmt(obs["resid_F"][k]),
                fmt(obs["resid_Ftilde"][k]),
            ])


def steady_summary(sc: Scenario, method: Optional[str] = None) -> dict:
    if sc.kappa == 0:
        return {"steady": "skipped (kappa=0)", "ok": True, "checks": {}}
    real = realization_for(sc)
    space = real.space
    L = build_liouvillian(real, sc.g, sc.kappa)
    try:
        res = steady_state(L, sc.sector, method or sc.method, tol=sc.tol)
    except DegenerateNullSpace as exc:
        return {"steady": "failed", "error": str(exc), "null_dim": exc.dim, "ok": False, "checks": {}}
    leak = truncation_leak(res.state)
    out = {
        "steady": "computed",
        "kind": sc.kind,
        "g": sc.g,
        "kappa": sc.kappa,
        "beta": sc.beta,
        "cutoffs": list(sc.cutoffs),
        "sector": sc.sector,
        "method": res.method,
        "null_residual": res.null_residual,
        "null_dim": res.null_dim,
        "singular_gap": res.gap,
        "lambda_target": res.lambda_target,
        "lambda_target_tilde": res.lambda_target_tilde,
        "lambda_F_rayleigh": res.lambda_F_rayleigh,
        "resid_F": res.resid_F,
        "resid_Ftilde": res.resid_Ftilde,
        "trace": res.trace,
        "herm_dev": res.herm_dev,
        "min_eig": res.min_eig,
        "leak": leak,
    }
    zeta = res.lambda_target
    if sc.kind == "pair_ab" and sc.sector is not None:
        out["fidelity_pair_coherent"] = fidelity(res.state, pair_coherent(space, zeta, sc.sector, loss_bound=1.0))
    if sc.kind == "square_a2" and sc.sector is not None:
        parity = {0: "even", 1: "odd"}.get(sc.sector, sc.sector)
        out["fidelity_cat"] = fidelity(res.state, cat_state(space, cat_alpha(sc.g, sc.kappa), parity, loss_bound=1.0))
    if sc.reference is not None:
        out["fidelity_reference"] = fidelity(res.state, _reference_state(sc.reference, space))
    checks = {
        "null_residual": res.null_residual <= NULL_TOL,
        "trace": abs(res.trace - 1) <= STEADY_TRACE_TOL,
        "hermiticity": res.herm_dev <= STEADY_HERM_TOL,
        "positivity": not (res.min_eig < MIN_EIG_TOL),
    }
    # the residual scales like sqrt(leak), so only a converged truncation can meet the bound
    if sc.kind in CONTRACT_KINDS and leak <= EIGEN_RELATION_TOL**2:
        checks["eigen_relations"] = max(res.resid_F, res.resid_Ftilde) <= EIGEN_RELATION_TOL
    out["checks"] = checks
    out["ok"] = all(checks.values())
    return out


def run_scenario(sc: Scenario, out_dir, parts=("verify", "evolve", "steady"), dense_oracle: bool = False) -> bool:
    """Write the requested artifacts under ``out_dir``; True iff every hard invariant held."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ok = True
    if "verify" in parts:
        report = verify(sc)
        write_json(out / "verify.json", report)
        ok &= report["ok"]
    if "evolve" in parts:
        traj, checks, oracle = evolve_scenario(sc, dense_oracle)
        write_trajectory(out / "trajectory.csv", traj)
        if oracle is not None:
            write_json(out / "oracle.json", oracle)
        failed = [k for k, v in checks.items() if not v]
        if failed:
            log.error("%s: trajectory invariants failed: %s", sc.name, ", ".join(failed))
        ok &= not failed
    if "steady" in parts:
        summary = steady_summary(sc, "dense_null" if dense_oracle else None)
        write_json(out / "steady.json", summary)
        ok &= summary["ok"]
    return bool(ok)
