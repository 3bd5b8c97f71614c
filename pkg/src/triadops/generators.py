"""Seeded random and canonical constructions for each state class.

Randomness comes from numpy's Philox generator (a documented 64-bit
counter-based RNG), so identical (parameters, seed) pairs reproduce bitwise
identical matrices on every platform.  The distributions are chosen for test
coverage, not for any physical sampling measure.
"""

from __future__ import annotations

import numpy as np

from .contractions import flip, maximally_entangled_vector, realign
from .errors import BadRank, FixedPointNotReached, RejectionBudgetExhausted, UnknownName
from .tensor_core import BipartiteOperator, LocalOperator
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "rng_from_seed",
    "random_density",
    "random_separable",
    "random_spc",
    "random_invariant",
    "random_ppt",
    "canonical",
]


def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed)))


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_density(k: int, rank: int, seed: int) -> BipartiteOperator:
    """GG*/tr(GG*) with G a (k^2 x rank) complex Gaussian matrix."""
    if not 1 <= rank <= k * k:
        raise BadRank(f"rank must lie in [1, {k * k}], got {rank}")
    rng = rng_from_seed(seed)
    g = _complex_normal(rng, (k * k, rank))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return BipartiteOperator(0.5 * (rho + rho.conj().T), dim_a=k, dim_b=k)


def random_separable(
    k: int, terms: int, seed: int
) -> tuple[BipartiteOperator, list[tuple[float, LocalOperator, LocalOperator]]]:
    """Dirichlet-weighted mixture of random pure product states, plus its recipe."""
    rng = rng_from_seed(seed)
    weights = rng.dirichlet(np.ones(terms))
    total = np.zeros((k * k, k * k), dtype=complex)
    ground_truth = []
    for w in weights:
        x = _complex_normal(rng, k)
        x /= np.linalg.norm(x)
        y = _complex_normal(rng, k)
        y /= np.linalg.norm(y)
        px, py = np.outer(x, x.conj()), np.outer(y, y.conj())
        total += w * np.kron(px, py)
        ground_truth.append((float(w), LocalOperator(px), LocalOperator(py)))
    return BipartiteOperator(0.5 * (total + total.conj().T), dim_a=k, dim_b=k), ground_truth


def _random_hermitian_orthobasis(rng: np.random.Generator, k: int) -> list[np.ndarray]:
    """Random orthonormal Hermitian set starting with Id/sqrt(k), full size k^2."""
    basis = [np.eye(k, dtype=complex) / np.sqrt(k)]
    while len(basis) < k * k:
        h = _complex_normal(rng, (k, k))
        h = 0.5 * (h + h.conj().T)
        for b in basis:
            h = h - np.trace(b.conj().T @ h) * b
        nrm = np.linalg.norm(h)
        if nrm > 1e-8:
            basis.append(h / nrm)
    return basis


def random_spc(k: int, seed: int, budget: int = 1000) -> BipartiteOperator:
    """Random state of the form sum_i a_i B_i (x) B_i with orthonormal Hermitian B_i.

    The leading term is fixed at (1/k) Id/sqrt(k) (x) Id/sqrt(k), which pins
    the trace at one; the remaining coefficients are resampled (with a slow
    scale back-off) until the total is PSD.
    """
    rng = rng_from_seed(seed)
    basis = _random_hermitian_orthobasis(rng, k)
    lead = np.kron(basis[0], basis[0]) / k
    tail = np.stack([np.kron(b, b) for b in basis[1:]])
    scale = 0.5 / (k * k * np.sqrt(len(tail)))
    for attempt in range(budget):
        coeffs = rng.exponential(scale, size=len(tail))
        cand = lead + np.einsum("i,ijk->jk", coeffs, tail)
        cand = 0.5 * (cand + cand.conj().T)
        if np.linalg.eigvalsh(cand)[0] >= 0.0:
            return BipartiteOperator(cand, dim_a=k, dim_b=k)
        if (attempt + 1) % 25 == 0:
            scale *= 0.75
    raise RejectionBudgetExhausted(f"no PSD draw in {budget} attempts at k={k}")


def random_invariant(
    k: int, seed: int, max_sweeps: int = 5000, stop_tol: float = 1e-10
) -> BipartiteOperator:
    """Random realignment-invariant state via alternating projections.

    Starting from a full-rank random density, each sweep averages the state
    with its realignment (the orthogonal projection onto the fixed subspace),
    restores Hermiticity, clips negative eigenvalues, and renormalizes the
    trace, until the realignment distance drops below ``stop_tol``.
    """
    gamma = random_density(k, k * k, seed).mat.copy()
    for _ in range(max_sweeps):
        r = realign(BipartiteOperator(gamma, k, k)).mat
        if np.linalg.norm(r - gamma) <= stop_tol:
            out = 0.5 * (gamma + gamma.conj().T)
            return BipartiteOperator(out / np.trace(out).real, dim_a=k, dim_b=k)
        gamma = 0.5 * (gamma + r)
        gamma = 0.5 * (gamma + gamma.conj().T)
        w, v = np.linalg.eigh(gamma)
        gamma = (v * np.maximum(w, 0.0)) @ v.conj().T
        gamma /= np.trace(gamma).real
    raise FixedPointNotReached(
        f"alternating projection did not settle in {max_sweeps} sweeps (seed={seed})"
    )


def _is_ppt_strict(mat: np.ndarray, k: int) -> bool:
    pt = BipartiteOperator(mat, k, k).tensor4.transpose(0, 3, 2, 1).reshape(k * k, k * k)
    pt = 0.5 * (pt + pt.conj().T)
    return bool(np.linalg.eigvalsh(pt)[0] >= 0.0)


def random_ppt(k: int, seed: int, budget: int = 200_000, tols: Tolerances = DEFAULT) -> BipartiteOperator:
    """Random PPT state.

    For k = 2 this is plain accept-reject over full-rank random densities
    (about one in four draws is PPT).  From k = 3 on the acceptance rate
    collapses below 1e-3, so the draw instead mixes a random separable state
    with a little Gaussian PSD noise and alternately clips the negative
    eigenvalues of the state and of its partial transpose; the resulting
    distribution is ad hoc but the output is genuinely PPT.
    """
    rng = rng_from_seed(seed)
    if k <= 2:
        for _ in range(budget):
            g = _complex_normal(rng, (k * k, k * k))
            rho = g @ g.conj().T
            rho = 0.5 * (rho + rho.conj().T)
            rho /= np.trace(rho).real
            if _is_ppt_strict(rho, k):
                return BipartiteOperator(rho, dim_a=k, dim_b=k)
        raise RejectionBudgetExhausted(f"no PPT draw in {budget} attempts at k={k}")

    sep, _ = random_separable(k, 2 * k * k, seed)
    noise = _complex_normal(rng, (k * k, k * k))
    noise = noise @ noise.conj().T
    noise /= np.trace(noise).real
    rho = 0.9 * sep.mat + 0.1 * noise
    for _ in range(500):
        op = BipartiteOperator(rho, k, k)
        pt = op.tensor4.transpose(0, 3, 2, 1).reshape(k * k, k * k)
        pt = 0.5 * (pt + pt.conj().T)
        w, v = np.linalg.eigh(pt)
        if w[0] >= 0.0 and np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] >= 0.0:
            rho = 0.5 * (rho + rho.conj().T)
            return BipartiteOperator(rho / np.trace(rho).real, dim_a=k, dim_b=k)
        clipped = (v * np.maximum(w, 0.0)) @ v.conj().T
        back = BipartiteOperator(clipped, k, k).tensor4.transpose(0, 3, 2, 1)
        rho = back.reshape(k * k, k * k)
        rho = 0.5 * (rho + rho.conj().T)
        w2, v2 = np.linalg.eigh(rho)
        rho = (v2 * np.maximum(w2, 0.0)) @ v2.conj().T
        rho /= np.trace(rho).real
    raise RejectionBudgetExhausted(f"PPT re-projection did not settle at k={k}")


def canonical(name: str, k: int, alpha: float | None = None) -> BipartiteOperator:
    """Named fixture states used across the test suites.

    classical_diag     (1/k) sum_i e_ii (x) e_ii
    bell               normalized projector on the maximally entangled vector
    identity_plus_u    (Id (x) Id + u u^t) / (k^2 + k)
    werner             (Id (x) Id + alpha * F) / (k^2 + alpha k), |alpha| <= 1
    """
    if name == "classical_diag":
        mat = np.zeros((k * k, k * k), dtype=complex)
        for i in range(k):
            e = np.zeros((k, k))
            e[i, i] = 1.0
            mat += np.kron(e, e) / k
        return BipartiteOperator(mat, dim_a=k, dim_b=k)
    if name == "bell":
        u = maximally_entangled_vector(k)
        return BipartiteOperator(np.outer(u, u.conj()) / k, dim_a=k, dim_b=k)
    if name == "identity_plus_u":
        u = maximally_entangled_vector(k)
        mat = (np.eye(k * k) + np.outer(u, u.conj())) / (k * k + k)
        return BipartiteOperator(mat, dim_a=k, dim_b=k)
    if name == "werner":
        if alpha is None or not -1.0 <= alpha <= 1.0:
            raise UnknownName("werner requires a mixing parameter alpha in [-1, 1]")
        mat = (np.eye(k * k) + alpha * flip(k).mat) / (k * k + alpha * k)
        return BipartiteOperator(mat, dim_a=k, dim_b=k)
    raise UnknownName(f"unknown canonical state {name!r}")
