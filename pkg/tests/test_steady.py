import numpy as np
import pytest
from scipy.special import iv

from janusme.fock import basis_state, make_space
from janusme.janus import JanusConfig, build_pair
from janusme.reference import cat_alpha, cat_state, fidelity, pair_coherent
from janusme.steady import (
    DegenerateNullSpace,
    SteadyStateError,
    eigen_residuals,
    lambda_targets,
    sector_basis,
    steady_state,
)
from janusme.tfd import build_liouvillian, pure_state


def pair(kind, cutoffs):
    return build_pair(JanusConfig(kind, make_space(cutoffs)))


def test_sector_basis_examples():
    r = pair("pair_ab", [3, 3])
    zero = sector_basis(r, 0)
    assert zero.size == 9
    d = r.space.dim
    diag = [r.space.index((n, n)) for n in range(3)]
    assert sorted(zero) == sorted(i * d + j for i in diag for j in diag)
    top = sector_basis(r, 2)
    i = r.space.index((2, 0))
    np.testing.assert_array_equal(top, [i * d + i])
    even = sector_basis(pair("square_a2", [4]), "even")
    np.testing.assert_array_equal(even, [0, 2, 8, 10])
    with pytest.raises(SteadyStateError):
        sector_basis(r, 5)


def test_lambda_targets():
    assert lambda_targets(0.5, 1.0) == (-1j, 1j)
    a, _ = lambda_targets(0.25, 1.0)
    b, _ = lambda_targets(0.5, 1.0)
    assert b == 2 * a
    with pytest.raises(SteadyStateError):
        lambda_targets(0.5, 0.0)


def test_vacuum_eigen_residual_is_target_modulus():
    r = pair("pair_ab", [4, 4])
    res = eigen_residuals(pure_state(basis_state(r.space, [0, 0]), r.space), r, 0.3, 1.2)
    assert res.resid_F == pytest.approx(2 * 0.3 / 1.2)
    assert res.resid_Ftilde == pytest.approx(2 * 0.3 / 1.2)
    assert res.lambda_F_rayleigh == 0


def test_pair_ab_steady_state_is_pair_coherent():
    r = pair("pair_ab", [20, 20])
    L = build_liouvillian(r, 0.5, 1.0)
    res = steady_state(L, sector=0)
    ref = pair_coherent(r.space, -1j, 0)
    assert fidelity(res.state, ref) == pytest.approx(1, abs=1e-10)
    assert res.null_residual <= 1e-10
    assert res.resid_F <= 1e-8 and res.resid_Ftilde <= 1e-8
    assert res.lambda_F_rayleigh == pytest.approx(-1j, abs=1e-10)
    assert res.trace == pytest.approx(1, abs=1e-12)
    assert res.min_eig >= -1e-10
    assert res.gap is not None and res.gap > 1e-3
    n_a = np.real(np.trace(np.diag(r.space.occupation_table()[:, 0]) @ res.state.matrix()))
    assert n_a == pytest.approx(iv(1, 2) / iv(0, 2), abs=1e-9)


def test_pair_ab_charged_sector():
    r = pair("pair_ab", [16, 18])
    res = steady_state(build_liouvillian(r, 0.4, 1.0), sector=-1)
    assert fidelity(res.state, pair_coherent(r.space, -0.8j, -1)) == pytest.approx(1, abs=1e-9)


def test_zero_drive_gives_vacuum():
    r = pair("pair_ab", [5, 5])
    res = steady_state(build_liouvillian(r, 0.0, 1.0), sector=0)
    rho = res.state.matrix()
    assert rho[0, 0] == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("parity", ["even", "odd"])
def test_square_steady_state_is_cat(parity):
    r = pair("square_a2", [30])
    res = steady_state(build_liouvillian(r, 0.5, 1.0), sector=parity)
    ref = cat_state(r.space, cat_alpha(0.5, 1.0), parity)
    assert fidelity(res.state, ref) == pytest.approx(1, abs=1e-10)
    assert res.resid_F <= 1e-8


def test_liouvillian_is_block_diagonal_in_sectors():
    r = pair("pair_ab", [4, 4])
    L = build_liouvillian(r, 0.5, 1.0)
    A = L.op.toarray()
    inside = sector_basis(r, 0)
    outside = np.setdiff1d(np.arange(L.dim), inside)
    assert np.all(A[np.ix_(outside, inside)] == 0)
    assert np.all(A[np.ix_(inside, outside)] == 0)


def test_dense_and_shift_invert_agree():
    r = pair("pair_ab", [12, 12])
    L = build_liouvillian(r, 0.5, 1.0)
    a = steady_state(L, sector=0, method="dense_null")
    b = steady_state(L, sector=0, method="shift_invert")
    assert a.method == "dense_null" and b.method == "shift_invert"
    assert np.linalg.norm(a.state.amplitudes - b.state.amplitudes) <= 1e-8


def test_kappa_zero_rejected():
    r = pair("square_a2", [6])
    with pytest.raises(SteadyStateError):
        steady_state(build_liouvillian(r, 0.5, 0.0))


def test_unrestricted_pair_is_degenerate():
    r = pair("pair_ab", [6, 6])
    L = build_liouvillian(r, 0.5, 1.0)
    with pytest.raises(DegenerateNullSpace) as info:
        steady_state(L, method="dense_null")
    assert info.value.dim > 1
    with pytest.raises(DegenerateNullSpace) as info:
        steady_state(L, method="shift_invert")
    assert info.value.at_least


def test_unknown_method():
    r = pair("square_a2", [6])
    with pytest.raises(SteadyStateError):
        steady_state(build_liouvillian(r, 0.5, 1.0), sector="even", method="power")
