import math

import numpy as np
import pytest

from conftest import haar_su
from spinsteer.linalg import dagger, expm, frob
from spinsteer.twospin import (T_DIAG, TO_DIAG, TO_LAB, Controllability, SpinSystem,
                               block_form_error, build_system, cartan_split,
                               classify_controllability, kak_element, large_time_threshold,
                               member_large_time, split_local)


def test_coordinate_change_spectrum():
    sys_ = build_system(1.0, J=2.0)
    d = TO_DIAG(sys_.D)
    assert frob(d - (-0.5j) * np.diag([-3.0, 1, 1, 1])) < 1e-12
    assert frob(TO_LAB(TO_DIAG(sys_.A)) - sys_.A) < 1e-14


def test_diag_coordinates_of_model_matrices():
    g, J = 0.7, 2.0
    sys_ = build_system(g, J=J)
    from spinsteer.linalg import so_basis
    assert frob(TO_DIAG(sys_.A) - (-1j * J / 4) * np.diag([-1.0, -1, 1, 1])) < 1e-12
    assert frob(TO_DIAG(sys_.Bx) - g * so_basis(2, 3, 4)) < 1e-12
    assert frob(TO_DIAG(sys_.By) + g * so_basis(2, 4, 4)) < 1e-12
    assert frob(TO_DIAG(sys_.Bz) - g * so_basis(3, 4, 4)) < 1e-12


@pytest.mark.parametrize("J", [1.0, -3.0])
def test_eigenphases(J):
    sys_ = build_system(1.0, J=J)
    want = np.sort(np.array([-J / 6, -J / 6, 0, J / 3]))
    for a in (sys_.A1, sys_.A2, sys_.A3):
        w = np.sort(np.linalg.eigvals(a).imag)
        assert np.abs(w - want).max() < 1e-12
        assert frob(expm(a, 12 * math.pi / abs(J)) - np.eye(4)) < 1e-10


def test_classification():
    assert classify_controllability(build_system(1.0, 0.6, J=1.0, uz_bar=0.4)) == (
        Controllability.SU4_FULL, 15)
    assert classify_controllability(build_system(1.0, J=1.0, uz_bar=0.4))[1] == 9
    assert classify_controllability(build_system(1.0, J=1.0, abc=(1, 1, 1)))[1] == 4


def test_classification_invariant_under_unitary_change(rng):
    sys_ = build_system(1.0, 0.6, J=1.0, uz_bar=0.4)
    U = haar_su(4, rng)
    from spinsteer.linalg import lie_closure
    gens = [U @ g @ dagger(U) for g in (sys_.drift, sys_.Bx, sys_.By)]
    assert lie_closure(gens).dim == 15


def test_system_validation_and_round_trip():
    with pytest.raises(ValueError):
        SpinSystem(1.0, 1.0, 0.0)
    s = build_system(1.0, J=2.0, uz_bar=0.5, M=0.3)
    back = SpinSystem.from_dict(s.to_dict())
    assert back.to_dict() == s.to_dict()
    assert s.is_ising and s.homonuclear


def test_cartan_split():
    sp = cartan_split(build_system(1.0, J=1.0))
    assert sp.K.dim == 3 and sp.P.dim == 5
    assert max(sp.residuals.values()) < 1e-10
    with pytest.raises(ValueError):
        cartan_split(build_system(1.0, 0.5, J=1.0))


def test_split_local(rng):
    L = haar_su(2, rng)
    got = split_local(np.kron(L, L))
    assert frob(np.kron(got, got) - np.kron(L, L)) < 1e-10
    with pytest.raises(ValueError):
        split_local(haar_su(4, rng))


def test_kak_elements_are_reachable(rng):
    sys_ = build_system(1.0, J=1.0)
    T = large_time_threshold(sys_) * 1.2
    for _ in range(10):
        K1, K2 = (np.kron(L, L) for L in (haar_su(2, rng), haar_su(2, rng)))
        a = rng.dirichlet(np.ones(3)) * T
        a[2] = T - a[0] - a[1]
        X = kak_element(sys_, K1, K2, a, T)
        assert frob(X @ dagger(X) - np.eye(4)) < 1e-10
        assert abs(np.linalg.det(X) - 1) < 1e-10
        assert member_large_time(sys_, X, T)


def test_membership_rejects_and_threshold(rng):
    sys_ = build_system(1.0, J=1.0)
    T = large_time_threshold(sys_)
    assert not member_large_time(sys_, haar_su(4, rng), T)
    with pytest.raises(ValueError):
        member_large_time(sys_, np.eye(4), T / 2)
    assert block_form_error(np.eye(4)) < 1e-15
    assert T_DIAG.shape == (4, 4)
