"""Complex dense-matrix substrate for bipartite operators.

Index convention
----------------
A bipartite operator on C^k (x) C^m is stored as a single (k*m) x (k*m)
complex matrix.  The composite basis vector e_i (x) f_j maps to row
``i*m + j`` (row-major composite index).  Every contraction formula in the
toolkit is written against this convention.

All values are immutable after construction (the underlying arrays are
locked), so they are safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .errors import ConvergenceFailure, NotHermitian, NotPSD, ZeroMatrix
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "BipartiteOperator",
    "LocalOperator",
    "SpectralData",
    "Norms",
    "PsdReport",
    "kron",
    "hermitian_eig",
    "norms",
    "psd_check",
    "inv_sqrt_psd",
]


def _as_locked_complex(entries) -> np.ndarray:
    mat = np.array(entries, dtype=complex, order="C")
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"entries must be a square matrix, got shape {mat.shape}")
    if not np.all(np.isfinite(mat.view(float))):
        raise ValueError("entries must be finite (no NaN/Inf)")
    mat.setflags(write=False)
    return mat


class LocalOperator:
    """A dim x dim complex matrix acting on one tensor factor."""

    __slots__ = ("dim", "mat")

    def __init__(self, entries, dim: int | None = None):
        mat = _as_locked_complex(entries)
        if dim is None:
            dim = mat.shape[0]
        if dim != mat.shape[0]:
            raise ValueError(f"declared dim {dim} does not match matrix side {mat.shape[0]}")
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "mat", mat)

    def __setattr__(self, name, value):
        raise AttributeError("LocalOperator is immutable")

    def __repr__(self):
        return f"LocalOperator(dim={self.dim})"

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "re": self.mat.real.tolist(),
            "im": self.mat.imag.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "LocalOperator":
        mat = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
        return cls(mat, dim=int(data["dim"]))


class BipartiteOperator:
    """A (k*m) x (k*m) complex matrix with declared factor dimensions k, m."""

    __slots__ = ("dim_a", "dim_b", "mat")

    def __init__(self, entries, dim_a: int, dim_b: int):
        mat = _as_locked_complex(entries)
        dim_a, dim_b = int(dim_a), int(dim_b)
        if dim_a < 1 or dim_b < 1:
            raise ValueError("factor dimensions must be positive")
        if mat.shape[0] != dim_a * dim_b:
            raise ValueError(
                f"matrix side {mat.shape[0]} does not equal dim_a*dim_b = {dim_a * dim_b}"
            )
        object.__setattr__(self, "dim_a", dim_a)
        object.__setattr__(self, "dim_b", dim_b)
        object.__setattr__(self, "mat", mat)

    def __setattr__(self, name, value):
        raise AttributeError("BipartiteOperator is immutable")

    def __repr__(self):
        return f"BipartiteOperator(dim_a={self.dim_a}, dim_b={self.dim_b})"

    @property
    def tensor4(self) -> np.ndarray:
        """Read-only view with axes (row_a, row_b, col_a, col_b)."""
        k, m = self.dim_a, self.dim_b
        return self.mat.reshape(k, m, k, m)

    def to_json(self) -> dict:
        return {
            "dim_a": self.dim_a,
            "dim_b": self.dim_b,
            "re": self.mat.real.tolist(),
            "im": self.mat.imag.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "BipartiteOperator":
        mat = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
        return cls(mat, dim_a=int(data["dim_a"]), dim_b=int(data["dim_b"]))

    @classmethod
    def square(cls, entries) -> "BipartiteOperator":
        """Wrap a k^2 x k^2 matrix as an operator on C^k (x) C^k."""
        mat = np.asarray(entries)
        side = mat.shape[0]
        k = round(side ** 0.5)
        if k * k != side:
            raise ValueError(f"matrix side {side} is not a perfect square")
        return cls(mat, dim_a=k, dim_b=k)


Operator = Union[LocalOperator, BipartiteOperator]


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues (descending) and matching unitary eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


class Norms(NamedTuple):
    trace_norm: float
    frobenius_norm: float
    operator_norm: float


class PsdReport(NamedTuple):
    is_psd: bool
    min_eigenvalue: float


def kron(a: LocalOperator, b: LocalOperator) -> BipartiteOperator:
    """Tensor product a (x) b under the row-major composite index."""
    return BipartiteOperator(np.kron(a.mat, b.mat), dim_a=a.dim, dim_b=b.dim)


def _require_hermitian(mat: np.ndarray, herm_tol: float) -> np.ndarray:
    """Check the relative Hermiticity defect and return the Hermitian part."""
    defect = np.linalg.norm(mat - mat.conj().T)
    scale = np.linalg.norm(mat)
    if defect > herm_tol * max(scale, np.finfo(float).tiny):
        raise NotHermitian(
            f"Hermiticity defect {defect:.3e} exceeds {herm_tol:.1e} * ||a|| = {herm_tol * scale:.3e}"
        )
    return 0.5 * (mat + mat.conj().T)


def hermitian_eig(a: Operator, tols: Tolerances = DEFAULT) -> SpectralData:
    """Eigendecomposition of a Hermitian operator, deterministic for fixed input.

    Eigenvalues are sorted descending.  Each eigenvector's phase is fixed by
    making its largest-modulus coordinate real positive, and within degenerate
    clusters the columns are ordered lexicographically by their rounded
    coordinates, so repeated runs (and golden files) agree bit for bit.
    """
    mat = _require_hermitian(np.asarray(a.mat), tols.herm)
    try:
        w, v = np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"eigensolver did not converge: {exc}") from exc
    w = w[::-1].copy()
    v = v[:, ::-1].copy()

    for col in range(v.shape[1]):
        j = int(np.argmax(np.abs(v[:, col])))
        pivot = v[j, col]
        if abs(pivot) > 0:
            v[:, col] *= np.conj(pivot) / abs(pivot)

    # Reorder inside degenerate clusters only; the eigenvalue order is kept.
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 1.0)
    cluster_gap = 1e-12 * scale
    start = 0
    for stop in range(1, len(w) + 1):
        if stop == len(w) or w[start] - w[stop] > cluster_gap:
            if stop - start > 1:
                keys = [
                    tuple(np.round(np.concatenate([v[:, c].real, v[:, c].imag]), 10))
                    for c in range(start, stop)
                ]
                order = sorted(range(stop - start), key=lambda i: keys[i])
                v[:, start:stop] = v[:, [start + i for i in order]]
            start = stop
    w.setflags(write=False)
    v.setflags(write=False)
    return SpectralData(eigenvalues=w, eigenvectors=v)


def norms(a: Operator) -> Norms:
    """Trace, Frobenius, and operator norms from the singular values."""
    s = np.linalg.svd(np.asarray(a.mat), compute_uv=False)
    return Norms(
        trace_norm=float(np.sum(s)),
        frobenius_norm=float(np.sqrt(np.sum(s * s))),
        operator_norm=float(s[0]),
    )


def psd_check(a: Operator, tol: float = DEFAULT.psd, tols: Tolerances = DEFAULT) -> PsdReport:
    """Decide positive semidefiniteness of a Hermitian operator.

    The verdict is ``min_eig >= -tol * max(1, operator_norm)``.
    """
    mat = _require_hermitian(np.asarray(a.mat), tols.herm)
    w = np.linalg.eigvalsh(mat)
    min_eig = float(w[0])
    op_norm = float(np.max(np.abs(w))) if w.size else 0.0
    return PsdReport(is_psd=bool(min_eig >= -tol * max(1.0, op_norm)), min_eigenvalue=min_eig)


def inv_sqrt_psd(
    a: LocalOperator,
    rank_tol: float = DEFAULT.rank,
    tols: Tolerances = DEFAULT,
) -> LocalOperator:
    """Pseudo-inverse square root of a PSD operator.

    Eigenvalues above ``rank_tol * max_eigenvalue`` map to 1/sqrt(eig), the
    rest to zero, so the result restricted to the kernel vanishes.
    """
    mat = _require_hermitian(a.mat, tols.herm)
    w, v = np.linalg.eigh(mat)
    lam_max = float(w[-1])
    if lam_max <= 0 or np.all(w <= rank_tol * lam_max):
        raise ZeroMatrix("all eigenvalues fall below the rank threshold")
    if w[0] < -tols.psd * max(1.0, lam_max):
        raise NotPSD(f"negative eigenvalue {w[0]:.3e} in inv_sqrt_psd input")
    inv = np.where(w > rank_tol * lam_max, 1.0 / np.sqrt(np.maximum(w, np.finfo(float).tiny)), 0.0)
    out = (v * inv) @ v.conj().T
    return LocalOperator(0.5 * (out + out.conj().T), dim=a.dim)
