import json

import numpy as np
import pytest

from triadops import (
    BipartiteOperator,
    LocalOperator,
    flip,
    hermitian_eig,
    inv_sqrt_psd,
    kron,
    norms,
    psd_check,
    rng_from_seed,
)
from triadops.errors import NotHermitian, NotPSD, ZeroMatrix

from conftest import random_hermitian, random_psd_local

SX = np.array([[0.0, 1.0], [1.0, 0.0]])


def test_kron_identity():
    out = kron(LocalOperator(np.eye(2)), LocalOperator(np.eye(2)))
    assert np.array_equal(out.mat, np.eye(4))
    assert out.dim_a == out.dim_b == 2


def test_kron_elementary_tensor():
    e1 = np.zeros((2, 2))
    e1[0, 0] = 1.0
    e2 = np.zeros((2, 2))
    e2[1, 1] = 1.0
    out = kron(LocalOperator(e1), LocalOperator(e2)).mat
    expected = np.zeros((4, 4))
    expected[0 * 2 + 1, 0 * 2 + 1] = 1.0
    assert np.array_equal(out, expected)


def test_kron_pauli_x_pair():
    # worked out entrywise: sigma_x (x) sigma_x is the anti-diagonal of ones
    out = kron(LocalOperator(SX), LocalOperator(SX)).mat
    assert np.array_equal(out, np.fliplr(np.eye(4)))


def test_kron_bilinear_sweep():
    rng = rng_from_seed(101)
    for _ in range(100):
        k = int(rng.integers(2, 5))
        m = int(rng.integers(2, 5))
        a = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        b = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        c = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        alpha = complex(rng.standard_normal(), rng.standard_normal())
        lhs = kron(LocalOperator(alpha * a + b), LocalOperator(c)).mat
        rhs = alpha * kron(LocalOperator(a), LocalOperator(c)).mat + kron(
            LocalOperator(b), LocalOperator(c)
        ).mat
        assert np.max(np.abs(lhs - rhs)) <= 1e-13


def test_hermitian_eig_identity():
    sd = hermitian_eig(LocalOperator(np.eye(2)))
    assert np.allclose(sd.eigenvalues, [1.0, 1.0])
    assert np.allclose(sd.eigenvectors @ sd.eigenvectors.conj().T, np.eye(2))


def test_hermitian_eig_flip():
    # the swap operator squares to the identity; its +1 eigenspace is the
    # symmetric subspace (dim 3 for k=2), the -1 eigenspace antisymmetric
    sd = hermitian_eig(flip(2))
    assert np.allclose(sd.eigenvalues, [1.0, 1.0, 1.0, -1.0])


def test_hermitian_eig_diagonal():
    sd = hermitian_eig(LocalOperator(np.diag([3.0, 1.0])))
    assert np.allclose(sd.eigenvalues, [3.0, 1.0])
    assert np.allclose(np.abs(sd.eigenvectors), np.eye(2))


def test_hermitian_eig_reconstruction_sweep():
    rng = rng_from_seed(7)
    for n in (2, 3, 4, 9, 16, 36):
        h = random_hermitian(rng, n)
        sd = hermitian_eig(LocalOperator(h))
        rebuilt = (sd.eigenvectors * sd.eigenvalues) @ sd.eigenvectors.conj().T
        assert np.linalg.norm(rebuilt - h) <= 1e-10 * np.linalg.norm(h)
        assert np.all(np.diff(sd.eigenvalues) <= 1e-12)


def test_hermitian_eig_deterministic():
    rng = rng_from_seed(13)
    h = random_hermitian(rng, 5)
    a = hermitian_eig(LocalOperator(h))
    b = hermitian_eig(LocalOperator(h.copy()))
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eig(LocalOperator([[0.0, 1.0], [0.0, 0.0]]))


def test_norms_identity_and_rank_one():
    assert norms(LocalOperator(np.eye(3))) == pytest.approx((3.0, np.sqrt(3.0), 1.0))
    u = np.array([0.6, 0.8])
    assert norms(LocalOperator(np.outer(u, u))) == pytest.approx((1.0, 1.0, 1.0))


def test_norms_flip():
    assert norms(flip(2)) == pytest.approx((4.0, 2.0, 1.0))


def test_norm_ordering_sweep():
    rng = rng_from_seed(23)
    for _ in range(50):
        n = int(rng.integers(2, 7))
        m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        tn, fn, on = norms(LocalOperator(m))
        assert tn >= fn - 1e-12
        assert fn >= on - 1e-12


def test_trace_norm_equals_trace_for_psd():
    rng = rng_from_seed(24)
    for _ in range(20):
        a = random_psd_local(rng, int(rng.integers(2, 6)))
        assert norms(LocalOperator(a)).trace_norm == pytest.approx(
            np.trace(a).real, abs=1e-10
        )


def test_psd_check_examples(bell2):
    assert psd_check(LocalOperator(np.eye(2))) == (True, pytest.approx(1.0))
    from triadops import partial_transpose

    rep = psd_check(partial_transpose(bell2))
    assert rep.is_psd is False
    assert rep.min_eigenvalue == pytest.approx(-0.5, abs=1e-12)
    zero = psd_check(LocalOperator(np.zeros((3, 3))))
    assert zero.is_psd is True and zero.min_eigenvalue == 0.0


def test_inv_sqrt_psd_examples():
    assert np.allclose(inv_sqrt_psd(LocalOperator(np.eye(2))).mat, np.eye(2))
    assert np.allclose(
        inv_sqrt_psd(LocalOperator(np.diag([4.0, 1.0]))).mat, np.diag([0.5, 1.0])
    )
    assert np.allclose(
        inv_sqrt_psd(LocalOperator(np.diag([4.0, 0.0]))).mat, np.diag([0.5, 0.0])
    )


def test_inv_sqrt_psd_projection_property():
    rng = rng_from_seed(31)
    for _ in range(25):
        k = int(rng.integers(2, 6))
        rank = int(rng.integers(1, k + 1))
        a = random_psd_local(rng, k, rank)
        isr = inv_sqrt_psd(LocalOperator(a)).mat
        proj = isr @ a @ isr
        # idempotent Hermitian with trace = rank: the range projection
        assert np.linalg.norm(proj @ proj - proj) <= 1e-9
        assert abs(np.trace(proj).real - rank) <= 1e-8


def test_inv_sqrt_psd_errors():
    with pytest.raises(ZeroMatrix):
        inv_sqrt_psd(LocalOperator(np.zeros((2, 2))))
    with pytest.raises(NotPSD):
        inv_sqrt_psd(LocalOperator(np.diag([1.0, -1.0])))
    with pytest.raises(NotHermitian):
        inv_sqrt_psd(LocalOperator([[0.0, 1.0], [0.0, 0.0]]))


def test_operator_validation():
    with pytest.raises(ValueError):
        BipartiteOperator(np.eye(5), 2, 2)
    with pytest.raises(ValueError):
        BipartiteOperator(np.full((4, 4), np.nan), 2, 2)
    with pytest.raises(ValueError):
        LocalOperator(np.ones((2, 3)))


def test_operators_immutable(bell2):
    with pytest.raises((ValueError, AttributeError)):
        bell2.mat[0, 0] = 5.0
    with pytest.raises(AttributeError):
        bell2.dim_a = 3


def test_json_round_trip(bell2):
    data = json.loads(json.dumps(bell2.to_json()))
    back = BipartiteOperator.from_json(data)
    assert np.array_equal(back.mat, bell2.mat)
    local = LocalOperator(np.array([[1.0, 2.0 + 1j], [2.0 - 1j, 0.5]]))
    back_local = LocalOperator.from_json(json.loads(json.dumps(local.to_json())))
    assert np.array_equal(back_local.mat, local.mat)
