"""Acceptance suite: one PASS/FAIL line per criterion, at the agreed tolerances.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the summary) or
directly as ``python3 tests/test_acceptance.py``.
"""

import sys
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.special import iv

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES  # noqa: E402
from janusme.evolution import evolve, expm_oracle, physicality  # noqa: E402
from janusme.fock import adjoint, basis_state, ladder_op, make_space  # noqa: E402
from janusme.janus import JanusConfig, build_pair, commutator_residual, ff_dagger_norm  # noqa: E402
from janusme.reference import cat_alpha, cat_state, fidelity, pair_coherent, squeezed_vacuum, two_mode_squeezed  # noqa: E402
from janusme.steady import sector_basis, steady_state  # noqa: E402
from janusme.tfd import (  # noqa: E402
    build_liouvillian,
    identity_vector,
    kron_liouvillian,
    lift,
    max_abs_diff,
    pure_state,
    tilde,
    trace_form_check,
    vectorize,
)

G, KAPPA, BETA = 0.5, 1.0, 0.2


def report(label, ok, detail, elapsed=None, limit=None):
    if limit is not None:
        ok = ok and elapsed < limit
        detail += f"; runtime {elapsed:.2f} s (limit {limit} s)"
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def vacuum(space):
    return pure_state(basis_state(space, [0] * space.mode_count), space)


def realization(kind, cutoffs, beta=0.0):
    return build_pair(JanusConfig(kind, make_space(cutoffs), beta))


def physical_worst(states):
    worst = {"trace": 0.0, "herm": 0.0, "min_eig": np.inf}
    for s in states:
        p = physicality(s)
        worst["trace"] = max(worst["trace"], abs(p["trace"] - 1))
        worst["herm"] = max(worst["herm"], p["herm_dev"])
        worst["min_eig"] = min(worst["min_eig"], p["min_eig"])
    return worst


@pytest.fixture(scope="module")
def short_term_runs():
    start = time.perf_counter()
    times = np.linspace(0.0, 1.0, 5)
    real = realization("pair_ab", [30, 30])
    traj = evolve(build_liouvillian(real, G, 0.0), vacuum(real.space), times,
                  reference=lambda t: two_mode_squeezed(real.space, G * t, loss_bound=1.0))
    small = realization("pair_ab", [8, 8])
    L_small = build_liouvillian(small, G, 0.0)
    small_traj = evolve(L_small, vacuum(small.space), [0.0, 1.0])
    # exact: the generator is block diagonal in charge and the vacuum has charge 0
    oracle = expm_oracle(L_small, 1.0, vacuum(small.space), sector=sector_basis(small, 0))
    cat_real = realization("square_a2", [60])
    sq = evolve(build_liouvillian(cat_real, G, 0.0), vacuum(cat_real.space), times,
                reference=lambda t: squeezed_vacuum(cat_real.space, 2 * G * t, loss_bound=1.0))
    return {
        "pair": traj,
        "space": real.space,
        "oracle_diff": float(np.linalg.norm(small_traj.final.amplitudes - oracle.amplitudes)),
        "square": sq,
        "elapsed": time.perf_counter() - start,
    }


@pytest.fixture(scope="module")
def pair_steady():
    start = time.perf_counter()
    real = realization("pair_ab", [24, 24])
    L = build_liouvillian(real, G, KAPPA)
    res = steady_state(L, sector=0)
    elapsed = time.perf_counter() - start
    traj = evolve(L, vacuum(real.space), np.linspace(0, 6, 7), sector=sector_basis(real, 0))
    return real, res, traj, elapsed


@pytest.fixture(scope="module")
def cat_steady():
    start = time.perf_counter()
    real = realization("square_a2", [30])
    L = build_liouvillian(real, G, KAPPA)
    res = steady_state(L, sector="even")
    elapsed = time.perf_counter() - start
    traj = evolve(L, vacuum(real.space), np.linspace(0, 6, 7), sector=sector_basis(real, "even"))
    return real, res, traj, elapsed


def test_criterion_1_tfd_identities():
    start = time.perf_counter()
    worst = 0.0
    for cutoffs in ([2], [5], [8], [3, 4], [6, 8], [8, 8]):
        s = make_space(cutoffs)
        I = identity_vector(s).amplitudes
        for mode in range(s.mode_count):
            a = ladder_op(s, mode)
            worst = max(worst, np.max(np.abs(lift(a) @ I - adjoint(tilde(a)) @ I)),
                        np.max(np.abs(adjoint(lift(a)) @ I - tilde(a) @ I)))
    ok = report(1, worst <= 1e-13, f"max identity residual {worst:.2e} (<= 1e-13)",
                time.perf_counter() - start, 1)
    assert ok


def test_criterion_2_liouvillian_equivalence():
    start = time.perf_counter()
    kron, trace = 0.0, 0.0
    for kind, cutoffs in (("pair_ab", [8, 8]), ("square_a2", [8]), ("single_beta", [8]), ("pair_beta", [8, 8])):
        real = realization(kind, cutoffs, BETA if kind.endswith("beta") else 0.0)
        L = build_liouvillian(real, G, KAPPA, check=False)
        kron = max(kron, max_abs_diff(L.op, kron_liouvillian(real.F, G, KAPPA)))
        trace = max(trace, trace_form_check(L))
    literal = trace_form_check(build_liouvillian(realization("pair_ab", [8, 8]), G, KAPPA, literal=True))
    ok = kron <= 1e-13 and trace <= 1e-12 and literal > 1e-6
    ok = report(2, ok, f"kron diff {kron:.2e} (<= 1e-13), trace form {trace:.2e} (<= 1e-12), "
                f"literal ordering {literal:.3g} (> 1e-6)", time.perf_counter() - start, 5)
    assert ok


@pytest.mark.parametrize("kind,cutoffs,beta", [
    ("pair_ab", [12, 12], 0.0),
    ("square_a2", [16], 0.0),
    ("pair_beta", [12, 12], BETA),
])
def test_criterion_3_janus_contract(kind, cutoffs, beta):
    start = time.perf_counter()
    real = realization(kind, cutoffs, beta)
    resid = max(commutator_residual(real, w, margin=2) for w in range(len(real.G_daggers)))
    ok = report(f"3[{kind}]", resid <= 1e-12, f"commutator residual {resid:.3g} (<= 1e-12)",
                time.perf_counter() - start, 5)
    assert ok


def test_criterion_4_short_term(short_term_runs):
    r = short_term_runs
    space = r["space"]
    final = r["pair"].final
    fid = r["pair"].observables["fidelity_ref"][-1]
    p0 = final.matrix()[space.index((0, 0)), space.index((0, 0))].real
    sq = r["square"]
    odd = max(np.max(np.abs(np.real(np.diagonal(s.matrix()))[1::2])) for s in sq.states)
    sq_fid = sq.observables["fidelity_ref"][-1]
    ok = (1 - fid <= 1e-8 and abs(p0 - 1 / np.cosh(0.5) ** 2) <= 1e-6 and abs(p0 - 0.786448) <= 1e-6
          and r["oracle_diff"] <= 1e-9 and odd <= 1e-12 and 1 - sq_fid <= 1e-8)
    ok = report(4, ok, f"1-F(TMSS) {1 - fid:.2e}, p0 {p0:.10f} vs sech^2(0.5) {1 / np.cosh(0.5) ** 2:.10f}, "
                f"[8,8] expm diff {r['oracle_diff']:.2e}, odd population {odd:.2e}, "
                f"1-F(squeezed vacuum) {1 - sq_fid:.2e}", r["elapsed"], 60)
    assert ok


def test_criterion_5_pair_steady_state(pair_steady):
    real, res, _, elapsed = pair_steady
    fid = fidelity(res.state, pair_coherent(real.space, -1j, 0))
    n_a = float(np.real(np.diagonal(res.state.matrix())) @ real.space.occupation_table()[:, 0])
    target = iv(1, 2) / iv(0, 2)
    ok = (res.null_residual <= 1e-8 and res.resid_F <= 1e-5 and 1 - fid <= 1e-6
          and abs(n_a - target) <= 1e-4 and abs(n_a - 0.697775) <= 1e-4)
    ok = report(5, ok, f"null residual {res.null_residual:.2e}, resid_F {res.resid_F:.2e}, "
                f"1-F {1 - fid:.2e}, <n_a> {n_a:.8f} vs {target:.8f}", elapsed, 120)
    assert ok


def test_criterion_6_cat_steady_state(cat_steady):
    real, res, _, elapsed = cat_steady
    fid = fidelity(res.state, cat_state(real.space, cat_alpha(G, KAPPA), "even"))
    ok = res.resid_F <= 1e-4 and 1 - fid <= 1e-4
    ok = report(6, ok, f"resid_F {res.resid_F:.2e}, 1-F(even cat) {1 - fid:.2e}", elapsed, 120)
    assert ok


def test_criterion_7_physicality(short_term_runs, pair_steady, cat_steady):
    states = list(short_term_runs["pair"].states) + list(short_term_runs["square"].states)
    for _, res, traj, _ in (pair_steady, cat_steady):
        states += list(traj.states) + [res.state]
    w = physical_worst(states)
    ok = w["trace"] <= 1e-9 and w["herm"] <= 1e-9 and w["min_eig"] >= -1e-8
    ok = report(7, ok, f"{len(states)} states: trace dev {w['trace']:.2e}, herm dev {w['herm']:.2e}, "
                f"min eig {w['min_eig']:.2e}")
    assert ok


def test_criterion_8_oracle_equivalence():
    start = time.perf_counter()
    tol = 1e-10
    rng = np.random.default_rng(8)
    times = np.concatenate([[0.0], np.sort(rng.uniform(0, 2, 5))])
    worst = {}
    for kind, cutoffs in (("pair_ab", [5, 5]), ("square_a2", [20]), ("single_beta", [20]), ("pair_beta", [5, 5])):
        real = realization(kind, cutoffs, BETA if kind.endswith("beta") else 0.0)
        d = real.space.dim
        X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        rho0 = X @ X.conj().T
        rho0 = vectorize(rho0 / np.trace(rho0), real.space)
        for kappa in (0.0, KAPPA):
            L = build_liouvillian(real, G, kappa)
            traj = evolve(L, rho0, times, tol=tol)
            diff = max(np.linalg.norm(s.amplitudes - expm_oracle(L, t, rho0).amplitudes)
                       for s, t in zip(traj.states, traj.times))
            worst[f"{kind}/k={kappa:g}"] = diff
    top = max(worst.values())
    ok = report(8, top <= 10 * tol, f"max Frobenius diff {top:.2e} (<= {10 * tol:.0e}) over {len(worst)} runs",
                time.perf_counter() - start, 60)
    assert ok


def test_criterion_9_beta_diagnostics():
    start = time.perf_counter()
    parts = []
    finite = True
    for kind, cutoffs, sector in (("single_beta", [20], None), ("pair_beta", [12, 12], 0)):
        real = realization(kind, cutoffs, BETA)
        L = build_liouvillian(real, G, KAPPA)
        res = steady_state(L, sector=sector)
        traj = evolve(L, vacuum(real.space), np.linspace(0, 2, 5),
                      sector=sector_basis(real, 0) if sector is not None else None)
        norm = ff_dagger_norm(real)
        vals = [res.resid_F, res.resid_Ftilde, norm, traj.observables["resid_F"][-1]]
        finite &= bool(np.all(np.isfinite(vals)))
        parts.append(f"{kind}: resid_F {res.resid_F:.3g}, resid_Ftilde {res.resid_Ftilde:.3g}, "
                     f"|[F,F^dag]| {norm:.3g}")
    ok = report(9, finite, "; ".join(parts), time.perf_counter() - start, 120)
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
