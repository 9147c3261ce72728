import math

import numpy as np
import pytest

from conftest import haar_su, random_su2_algebra
from spinsteer.linalg import (SX, SY, SZ, I2, commutator, expm, expm_series, frob,
                              inner_product, is_real_orthogonal, is_skew_hermitian,
                              is_special, is_unitary, kron, lie_closure, logm_su2,
                              so_basis, span_basis)
from spinsteer.policy import get_policy, use_policy


def test_spin_commutation_relations():
    assert frob(commutator(SX, SY) - 1j * SZ) < 1e-15
    assert frob(commutator(SY, SZ) - 1j * SX) < 1e-15
    assert frob(commutator(SZ, SX) - 1j * SY) < 1e-15


def test_inner_product_real_for_skew_hermitian(rng):
    a, b = random_su2_algebra(rng), random_su2_algebra(rng)
    v = inner_product(a, b)
    assert isinstance(v, float)
    assert v == pytest.approx(float(np.real(np.trace(a @ b.conj().T))))


def test_inner_product_shape_mismatch():
    with pytest.raises(ValueError):
        inner_product(np.eye(2), np.eye(3))


def test_so_basis():
    s = so_basis(1, 3)
    assert s[0, 2] == 1 and s[2, 0] == -1 and np.count_nonzero(s) == 2
    with pytest.raises(ValueError):
        so_basis(2, 2)


def test_expm_matches_series_oracle(rng):
    for _ in range(20):
        a = random_su2_algebra(rng, 3.0)
        t = rng.uniform(-5, 5)
        assert frob(expm(a, t) - expm_series(a, t)) < 1e-12
    h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    k = h - h.conj().T
    assert frob(expm(k, 0.7) - expm_series(k, 0.7)) < 1e-12


def test_expm_real_for_real_input():
    out = expm(so_basis(1, 2), 0.4)
    assert np.isrealobj(out)
    assert out[0, 0] == pytest.approx(math.cos(0.4))
    assert out[0, 1] == pytest.approx(math.sin(0.4))


def test_expm_normal_non_skew():
    d = np.diag([1.0 + 2j, -0.5j, 0.3])
    assert frob(expm(d, 1.3) - np.diag(np.exp(np.diag(d) * 1.3))) < 1e-13


def test_expm_rejects_non_normal():
    with pytest.raises(ValueError):
        expm(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_expm_long_time_stays_unitary(rng):
    a = random_su2_algebra(rng, 2.0)
    assert is_unitary(expm(a, 1e4), 1e-12)


def test_predicates(rng):
    u = haar_su(3, rng)
    assert is_unitary(u, 1e-12) and is_special(u, 1e-12)
    assert is_skew_hermitian(random_su2_algebra(rng))
    assert is_real_orthogonal(expm(so_basis(1, 2), 1.0))
    assert not is_unitary(2 * np.eye(2))


def test_logm_round_trip(rng):
    for _ in range(50):
        x = haar_su(2, rng)
        L = logm_su2(x)
        assert frob(expm(L) - x) < 1e-12
        assert abs(np.trace(L)) < 1e-14


def test_logm_identity_and_minus_identity():
    assert frob(logm_su2(I2)) == 0
    L, flag = logm_su2(-I2, return_flag=True)
    assert flag
    assert frob(expm(L) + I2) < 1e-14
    assert not logm_su2(expm(-1j * SX, 1.0), return_flag=True)[1]


def test_kron_is_2x2_only():
    assert kron(SZ, I2).shape == (4, 4)
    with pytest.raises(ValueError):
        kron(np.eye(3), np.eye(2))


def test_lie_closure_su2_and_orthonormality():
    basis = lie_closure([-1j * SX, -1j * SY])
    assert basis.dim == 3
    assert basis.orthonormality_error() < 1e-13
    assert basis.contains(-1j * SZ)


def test_lie_closure_commuting_generators():
    assert lie_closure([-1j * SZ, -2j * SZ]).dim == 1


def test_lie_closure_rejects_non_skew():
    with pytest.raises(ValueError):
        lie_closure([np.eye(2)])


def test_span_basis_tolerance():
    b = span_basis([-1j * SX, -1j * SX * (1 + 1e-12)])
    assert b.dim == 1


def test_policy_override_is_scoped():
    base = get_policy().rank_tol
    with use_policy(rank_tol=1e-3) as p:
        assert p.rank_tol == 1e-3
    assert get_policy().rank_tol == base
