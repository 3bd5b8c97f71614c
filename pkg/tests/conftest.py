import numpy as np
import pytest

from triadops import BipartiteOperator, canonical


def random_operator(rng, k, m=None):
    m = k if m is None else m
    n = k * m
    mat = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    return BipartiteOperator(mat, k, m)


def random_hermitian(rng, n):
    h = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (h + h.conj().T)


def random_psd_local(rng, k, rank=None):
    rank = k if rank is None else rank
    g = (rng.standard_normal((k, rank)) + 1j * rng.standard_normal((k, rank))) / np.sqrt(2)
    return g @ g.conj().T


def random_pd_local(rng, k):
    return random_psd_local(rng, k) + 0.3 * np.eye(k)


def haar_unitary(rng, k):
    z = (rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def local_scale(op: BipartiteOperator, s: np.ndarray, t: np.ndarray) -> BipartiteOperator:
    """(s (x) t) op (s (x) t)^*, trace-normalized."""
    big = np.kron(s, t)
    out = big @ op.mat @ big.conj().T
    out = 0.5 * (out + out.conj().T)
    return BipartiteOperator(out / np.trace(out).real, op.dim_a, op.dim_b)


@pytest.fixture
def bell2():
    return canonical("bell", 2)


@pytest.fixture
def classical_diag2():
    return canonical("classical_diag", 2)


@pytest.fixture
def identity_plus_u2():
    return canonical("identity_plus_u", 2)
