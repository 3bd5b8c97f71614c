"""Complete-reducibility splitting, rank bounds, and separable extraction.

For states in the triad classes, every PSD eigenvector of the composite
contraction map with a nontrivial kernel splits the state into two blocks
with orthogonal local supports.  Applying the split recursively decomposes a
state into weakly irreducible components.  When the state additionally has
minimal rank (equal to its full reduced ranks), the recursion terminates in
pure product blocks and yields an explicit separable decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .criteria import TriadClassification, classify
from .errors import (
    CompleteReducibilityViolation,
    DimensionMismatch,
    FullRankEigenvector,
    NotPSD,
    NumericalDegeneracy,
    PreconditionNotMet,
    ZeroMatrix,
)
from .filters import sinkhorn_filter
from .schmidt_maps import (
    fg_apply,
    fg_matrix,
    g_apply,
    hermitian_from_coords,
    schmidt,
)
from .tensor_core import BipartiteOperator, LocalOperator, psd_check
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "PsdEigenvectorResult",
    "SplitCertificate",
    "DecompositionTree",
    "EqualCoefficientReport",
    "RankBoundReport",
    "SeparableDecomposition",
    "ExtractionFailure",
    "find_psd_eigenvector",
    "split",
    "decompose",
    "equal_schmidt_certificate",
    "rank_bound_check",
    "minimal_rank_extract",
]


# ---------------------------------------------------------------------------
# PSD eigenvector search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PsdEigenvectorResult:
    """Outcome of the singular-PSD eigenvector search.

    ``found=False`` certifies (by dense eigensolve) that no eigenvector of
    the composite contraction map is PSD with a nontrivial kernel; the top
    eigenvector, necessarily positive definite in that case, is returned as
    the witness.
    """

    found: bool
    x: LocalOperator | None
    eigenvalue: float | None
    full_rank_witness: LocalOperator | None = None


def _min_eig(mat: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))[0])


def _proj_rank(mat: np.ndarray, rank_tol: float) -> int:
    w = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))
    top = max(float(np.max(np.abs(w))), 0.0)
    if top == 0.0:
        return 0
    return int(np.sum(w > rank_tol * top))


def _clip_psd_unit(mat: np.ndarray) -> np.ndarray:
    """Nearest-PSD projection followed by Frobenius normalization."""
    w, v = np.linalg.eigh(0.5 * (mat + mat.conj().T))
    out = (v * np.maximum(w, 0.0)) @ v.conj().T
    nrm = np.linalg.norm(out)
    return out / nrm if nrm > 0 else out


def _eigen_residual(gamma: BipartiteOperator, x: np.ndarray) -> tuple[float, float]:
    """Eigenvalue estimate and residual of x under the composite map."""
    y = fg_apply(gamma, x).mat
    lam = float(np.real(np.trace(x.conj().T @ y)))
    return lam, float(np.linalg.norm(y - lam * x))


def _bisect_boundary(x_pd: np.ndarray, direction: np.ndarray) -> np.ndarray | None:
    """Walk from a PD matrix along a Hermitian direction to the PSD boundary.

    Returns the (normalized) matrix where the smallest eigenvalue crosses
    zero, which is PSD and singular; None if no sign change is found.
    """
    for sign in (1.0, -1.0):
        t_hi = None
        t = sign
        for _ in range(60):
            if _min_eig(x_pd + t * direction) < 0:
                t_hi = t
                break
            t *= 2.0
        if t_hi is None:
            continue
        lo, hi = 0.0, t_hi
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if _min_eig(x_pd + mid * direction) < 0:
                hi = mid
            else:
                lo = mid
        out = x_pd + lo * direction
        return _clip_psd_unit(out)
    return None


def find_psd_eigenvector(
    gamma: BipartiteOperator, tols: Tolerances = DEFAULT
) -> PsdEigenvectorResult:
    """Search for a PSD eigenvector of the composite contraction map with a kernel.

    Power iteration from the normalized identity delivers the top eigenpair
    (the iterates stay PSD because the map is positive); if the limit is
    singular it is returned directly.  Otherwise a dense eigensolve of the
    Hermitian-basis matrix scans every eigenvalue cluster: individual basis
    eigenvectors are tested with both signs, the projector onto the kernel
    of the first reduced state is tested when that marginal is singular, and
    inside degenerate clusters that contain a positive definite element the
    search walks line segments to the PSD boundary, where the crossing point
    is a singular PSD eigenvector.
    """
    if gamma.dim_a != gamma.dim_b:
        raise DimensionMismatch("eigenvector search requires equal factor dimensions")
    report = psd_check(gamma, tols.psd, tols)
    if not report.is_psd:
        raise NotPSD(f"input has min eigenvalue {report.min_eigenvalue:.3e}")
    k = gamma.dim_a

    mfg = fg_matrix(gamma, tols).matrix
    lam_scale = max(float(np.linalg.eigvalsh(mfg)[-1]), np.finfo(float).tiny)
    accept_res = 1e-8 * max(lam_scale, 1e-30)

    def _accept(cand: np.ndarray) -> PsdEigenvectorResult | None:
        cand = _clip_psd_unit(cand)
        rank = _proj_rank(cand, tols.rank)
        if not 0 < rank < k:
            return None
        lam, res = _eigen_residual(gamma, cand)
        if res > accept_res:
            return None
        return PsdEigenvectorResult(found=True, x=LocalOperator(cand), eigenvalue=lam)

    # Power iteration for the top eigenpair.
    x = np.eye(k, dtype=complex) / np.sqrt(k)
    top_vec = None
    for _ in range(500):
        y = fg_apply(gamma, x).mat
        nrm = np.linalg.norm(y)
        if nrm < 1e-300:
            break
        y = 0.5 * (y + y.conj().T) / nrm
        if np.linalg.norm(y - x) < 1e-14:
            x = y
            top_vec = x
            break
        x = y
    if top_vec is not None:
        hit = _accept(top_vec)
        if hit is not None:
            return hit

    # Dense scan over eigenvalue clusters of the basis matrix.
    w, v = np.linalg.eigh(mfg)
    w = w[::-1]
    v = v[:, ::-1]
    clusters: list[list[int]] = []
    for i in range(len(w)):
        if clusters and w[clusters[-1][-1]] - w[i] <= 1e-8 * lam_scale:
            clusters[-1].append(i)
        else:
            clusters.append([i])

    # The kernel projector of a singular first marginal is always an
    # eigenvector (eigenvalue zero); test it before the generic scan.
    ga = np.einsum("ijpj->ip", gamma.tensor4)
    wa, va = np.linalg.eigh(0.5 * (ga + ga.conj().T))
    dead = wa <= tols.rank * max(float(wa[-1]), np.finfo(float).tiny)
    if 0 < int(np.sum(dead)) < k:
        hit = _accept(va[:, dead] @ va[:, dead].conj().T)
        if hit is not None:
            return hit

    for cluster in clusters:
        mats = [hermitian_from_coords(v[:, i], k) for i in cluster]
        for h in mats:
            for sign in (1.0, -1.0):
                cand = sign * h
                if _min_eig(cand) >= -1e-12:
                    hit = _accept(cand)
                    if hit is not None:
                        return hit
        if len(mats) < 2:
            continue
        # Walk from the most positive element toward the other directions.
        best = max((s * h for h in mats for s in (1.0, -1.0)), key=_min_eig)
        if _min_eig(best) <= 1e-12:
            continue
        for h in mats:
            if np.linalg.norm(h - best) < 1e-12 or np.linalg.norm(h + best) < 1e-12:
                continue
            boundary = _bisect_boundary(best, h)
            if boundary is not None:
                hit = _accept(boundary)
                if hit is not None:
                    return hit

    witness = top_vec if top_vec is not None else hermitian_from_coords(v[:, 0], k)
    return PsdEigenvectorResult(
        found=False,
        x=None,
        eigenvalue=None,
        full_rank_witness=LocalOperator(_clip_psd_unit(witness)),
    )


# ---------------------------------------------------------------------------
# Splitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitCertificate:
    """Evidence that a state splits along orthogonal local supports.

    The projections are built from the spectral data of the eigenvector x
    (first factor) and of its image under the contraction map (second
    factor); the residual measures how exactly the state equals the sum of
    its two projected blocks.
    """

    x: LocalOperator
    eigenvalue: float
    proj_v: LocalOperator
    proj_w: LocalOperator
    proj_v_perp: LocalOperator
    proj_w_perp: LocalOperator
    residual: float

    def to_json(self) -> dict:
        return {
            "x": self.x.to_json(),
            "eigenvalue": self.eigenvalue,
            "proj_v": self.proj_v.to_json(),
            "proj_w": self.proj_w.to_json(),
            "proj_v_perp": self.proj_v_perp.to_json(),
            "proj_w_perp": self.proj_w_perp.to_json(),
            "residual": self.residual,
        }


def _support_projector(mat: np.ndarray, rank_tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Projector onto the numerical range, plus an isometry basis of it."""
    w, v = np.linalg.eigh(0.5 * (mat + mat.conj().T))
    top = max(float(np.max(np.abs(w))), 0.0)
    keep = w > rank_tol * top if top > 0 else np.zeros_like(w, dtype=bool)
    basis = v[:, keep]
    return basis @ basis.conj().T, basis


def split(
    gamma: BipartiteOperator, x: LocalOperator, tols: Tolerances = DEFAULT
) -> SplitCertificate:
    """Split a triad-class state along the supports of x and of its image.

    ``x`` must be a PSD eigenvector of the composite contraction map with
    rank strictly between 0 and k.  A residual above tolerance signals that
    gamma was not actually in a triad class (or x not an eigenvector) and
    raises CompleteReducibilityViolation.
    """
    if gamma.dim_a != gamma.dim_b:
        raise DimensionMismatch("split requires equal factor dimensions")
    k = gamma.dim_a
    xm = 0.5 * (x.mat + x.mat.conj().T)
    rank_x = _proj_rank(xm, tols.rank)
    if rank_x == 0:
        raise ZeroMatrix("split eigenvector is numerically zero")
    if rank_x == k:
        raise FullRankEigenvector("split needs an eigenvector with a nontrivial kernel")

    proj_v, _ = _support_projector(xm, tols.rank)
    gx = g_apply(gamma, xm).mat
    # an eigenvalue-zero eigenvector has a genuinely vanishing image; do not
    # let roundoff noise masquerade as a support
    if np.linalg.norm(gx) <= 1e-13 * np.linalg.norm(gamma.mat) * np.linalg.norm(xm):
        proj_w = np.zeros((k, k))
    else:
        proj_w, _ = _support_projector(gx, tols.rank)
    proj_v_perp = np.eye(k) - proj_v
    proj_w_perp = np.eye(k) - proj_w

    sandwich_1 = np.kron(proj_v, proj_w)
    sandwich_2 = np.kron(proj_v_perp, proj_w_perp)
    block_1 = sandwich_1 @ gamma.mat @ sandwich_1.conj().T
    block_2 = sandwich_2 @ gamma.mat @ sandwich_2.conj().T
    residual = float(np.linalg.norm(gamma.mat - block_1 - block_2))
    scale = max(float(np.linalg.norm(gamma.mat)), np.finfo(float).tiny)
    if residual > tols.split * scale:
        raise CompleteReducibilityViolation(
            f"split residual {residual:.3e} exceeds {tols.split:.1e} * ||gamma||; "
            "the input is not a triad-class state within tolerance"
        )
    lam, _ = _eigen_residual(gamma, xm / np.linalg.norm(xm))
    return SplitCertificate(
        x=LocalOperator(xm),
        eigenvalue=lam,
        proj_v=LocalOperator(proj_v),
        proj_w=LocalOperator(proj_w),
        proj_v_perp=LocalOperator(proj_v_perp),
        proj_w_perp=LocalOperator(proj_w_perp),
        residual=residual,
    )


# ---------------------------------------------------------------------------
# Recursive decomposition tree
# ---------------------------------------------------------------------------


@dataclass
class DecompositionTree:
    """Recursive record of complete-reducibility splits.

    Each node holds its (unnormalized) operator in its own compressed local
    dimensions together with the isometries embedding it into the parent's
    factors; summing the lifted leaves reproduces the root operator.  Blocks
    with numerically zero trace are dropped, so internal nodes carry one or
    two children.
    """

    state: BipartiteOperator
    embed_a: np.ndarray | None = None
    embed_b: np.ndarray | None = None
    certificate: SplitCertificate | None = None
    children: list["DecompositionTree"] = field(default_factory=list)
    leaf_status: str | None = None  # weakly_irreducible | not_split_found | None
    separable_decomposition: list | None = None

    def reconstruct(self) -> np.ndarray:
        """Operator of this node assembled from its leaves."""
        if not self.children:
            return self.state.mat
        total = np.zeros_like(self.state.mat)
        for child in self.children:
            lift = np.kron(child.embed_a, child.embed_b)
            total = total + lift @ child.reconstruct() @ lift.conj().T
        return total

    def leaves(self) -> list["DecompositionTree"]:
        if not self.children:
            return [self]
        out = []
        for child in self.children:
            out.extend(child.leaves())
        return out

    def to_json(self) -> dict:
        return {
            "state": self.state.to_json(),
            "leaf_status": self.leaf_status,
            "certificate": None if self.certificate is None else self.certificate.to_json(),
            "separable_decomposition": None
            if self.separable_decomposition is None
            else [
                {"weight": w, "left": x.to_json(), "right": y.to_json()}
                for w, x, y in self.separable_decomposition
            ],
            "children": [c.to_json() for c in self.children],
        }


def _compress_block(
    block: np.ndarray, basis_a: np.ndarray, basis_b: np.ndarray
) -> np.ndarray:
    lift = np.kron(basis_a, basis_b)
    out = lift.conj().T @ block @ lift
    return 0.5 * (out + out.conj().T)


def decompose(
    gamma: BipartiteOperator,
    max_depth: int | None = None,
    tols: Tolerances = DEFAULT,
) -> DecompositionTree:
    """Recursively split a triad-class state into weakly irreducible leaves.

    Each internal node carries the split certificate that produced its
    children; children are compressed to the supports of their local blocks
    before recursing.  Leaves are marked ``weakly_irreducible`` when the
    dense eigensolve certifies that no singular PSD eigenvector exists, and
    ``not_split_found`` when the depth cap is hit or a compressed block ends
    up with unequal local dimensions (where the square-only search does not
    apply).
    """
    classification = classify(gamma, tols)
    if not classification.any_flag:
        raise PreconditionNotMet("decompose needs at least one triad flag")
    if max_depth is None:
        max_depth = gamma.dim_a

    def _node(mat: np.ndarray, ka: int, kb: int, depth: int) -> DecompositionTree:
        state = BipartiteOperator(mat, ka, kb)
        if ka != kb:
            return DecompositionTree(state=state, leaf_status="not_split_found")
        found = find_psd_eigenvector(state, tols)
        if not found.found:
            return DecompositionTree(state=state, leaf_status="weakly_irreducible")
        if depth <= 0:
            return DecompositionTree(state=state, leaf_status="not_split_found")
        cert = split(state, found.x, tols)
        node = DecompositionTree(state=state, certificate=cert)
        pairs = (
            (cert.proj_v.mat, cert.proj_w.mat),
            (cert.proj_v_perp.mat, cert.proj_w_perp.mat),
        )
        for pv, pw in pairs:
            sandwich = np.kron(pv, pw)
            block = sandwich @ mat @ sandwich.conj().T
            if np.trace(block).real <= 1e-12 * max(np.trace(mat).real, 1e-300):
                continue
            _, ba = _support_projector(pv, 0.5)
            _, bb = _support_projector(pw, 0.5)
            child = _node(_compress_block(block, ba, bb), ba.shape[1], bb.shape[1], depth - 1)
            child.embed_a = ba
            child.embed_b = bb
            node.children.append(child)
        if not node.children:
            node.leaf_status = "not_split_found"
        return node

    mat = 0.5 * (gamma.mat + gamma.mat.conj().T)
    return _node(mat, gamma.dim_a, gamma.dim_b, max_depth)


# ---------------------------------------------------------------------------
# Equal-coefficient certificate and rank bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EqualCoefficientReport:
    applies: bool
    coefficient_spread: float
    certificate: dict | None

    def to_json(self) -> dict:
        return {
            "applies": self.applies,
            "coefficient_spread": self.coefficient_spread,
            "certificate": self.certificate,
        }


def equal_schmidt_certificate(
    gamma: BipartiteOperator,
    classification: TriadClassification,
    tols: Tolerances = DEFAULT,
) -> EqualCoefficientReport:
    """Separability certificate from equal nonzero Schmidt coefficients.

    A triad-class state whose nonzero Schmidt coefficients all coincide is
    separable; ``applies`` requires a triad flag and a relative coefficient
    spread below tolerance.  No explicit decomposition is produced here.
    """
    sd = schmidt(gamma, tols)
    if len(sd.coefficients) == 0:
        return EqualCoefficientReport(False, 0.0, None)
    spread = float(
        (np.max(sd.coefficients) - np.min(sd.coefficients)) / sd.coefficients[0]
    )
    applies = bool(classification.any_flag and spread <= tols.equal_coeff)
    certificate = None
    if applies:
        certificate = {
            "criterion": "equal nonzero Schmidt coefficients of a triad-class state",
            "coefficients": [float(s) for s in sd.coefficients],
            "spread": spread,
        }
    return EqualCoefficientReport(
        applies=applies, coefficient_spread=spread, certificate=certificate
    )


@dataclass(frozen=True)
class RankBoundReport:
    rank: int
    reduced_ranks: tuple[int, int]
    bound_holds: bool

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "reduced_ranks": list(self.reduced_ranks),
            "bound_holds": self.bound_holds,
        }


def rank_bound_check(
    gamma: BipartiteOperator,
    classification: TriadClassification,
    tols: Tolerances = DEFAULT,
) -> RankBoundReport:
    """Compare the state's rank against its reduced ranks.

    For triad-class states the rank can never be smaller than either reduced
    rank; the report's claim is only meaningful when a flag is set.
    """
    del classification  # recorded by the caller; the comparison is unconditional
    rank = _proj_rank(gamma.mat, tols.rank)
    ra = _proj_rank(np.einsum("ijpj->ip", gamma.tensor4), tols.rank)
    rb = _proj_rank(np.einsum("ijiq->jq", gamma.tensor4), tols.rank)
    return RankBoundReport(
        rank=rank, reduced_ranks=(ra, rb), bound_holds=bool(rank >= max(ra, rb))
    )


# ---------------------------------------------------------------------------
# Minimal-rank separable extraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeparableDecomposition:
    """Explicit mixture of product states: sum_i weight_i x_i (x) y_i."""

    terms: list[tuple[float, LocalOperator, LocalOperator]]
    reconstruction_residual: float

    def reconstruct(self) -> np.ndarray:
        k = self.terms[0][1].dim
        m = self.terms[0][2].dim
        total = np.zeros((k * m, k * m), dtype=complex)
        for w, x, y in self.terms:
            total += w * np.kron(x.mat, y.mat)
        return total

    def to_json(self) -> dict:
        return {
            "terms": [
                {"weight": w, "left": x.to_json(), "right": y.to_json()}
                for w, x, y in self.terms
            ],
            "reconstruction_residual": self.reconstruction_residual,
        }


@dataclass(frozen=True)
class ExtractionFailure:
    """Step-labelled report of a tolerance failure during extraction."""

    step: str
    detail: str
    residuals: dict

    def to_json(self) -> dict:
        return {"step": self.step, "detail": self.detail, "residuals": self.residuals}


class _StepFailure(Exception):
    def __init__(self, step: str, detail: str, residuals: dict | None = None):
        super().__init__(detail)
        self.step = step
        self.detail = detail
        self.residuals = residuals or {}


def _rank_deficient_eigenvector(
    vecs: np.ndarray, k: int, rank_tol: float
) -> np.ndarray:
    """Combine two eigenvectors into one whose k x k reshape is singular.

    Scans eigenvector pairs; for each pair the mixing parameter solves the
    determinant pencil det(M_i + alpha * M_j) = 0 through the generalized
    eigenvalue problem.  Raises NumericalDegeneracy when every pencil is
    identically singular.
    """
    n = vecs.shape[1]
    mats = [vecs[:, i].reshape(k, k) for i in range(n)]

    def _reshape_rank(vec: np.ndarray) -> int:
        s = np.linalg.svd(vec.reshape(k, k), compute_uv=False)
        return int(np.sum(s > rank_tol * s[0])) if s[0] > 0 else 0

    for i in range(n):
        if _reshape_rank(vecs[:, i]) < k:
            return vecs[:, i]
    for i in range(n):
        for j in range(i + 1, n):
            try:
                alphas = scipy.linalg.eig(mats[i], -mats[j], right=False)
            except (np.linalg.LinAlgError, ValueError):
                continue
            alphas = alphas[np.isfinite(alphas)]
            order = np.lexsort((alphas.imag.round(12), alphas.real.round(12), np.abs(alphas).round(12)))
            for alpha in alphas[order]:
                cand = vecs[:, i] + alpha * vecs[:, j]
                nrm = np.linalg.norm(cand)
                if nrm < 1e-10:
                    continue
                cand = cand / nrm
                if 0 < _reshape_rank(cand) < k:
                    return cand
    raise NumericalDegeneracy(
        "no eigenvector pair produced a rank-deficient combination"
    )


def _extract_normal_form(mat: np.ndarray, k: int, tols: Tolerances):
    """Recursive product extraction for a trace-1 state with marginals Id/k
    and k eigenvalues equal to 1/k.  Returns [(weight, x, y)] with trace-1
    PSD local factors summing back to the input.
    """
    if k == 1:
        return [(float(np.real(mat[0, 0])), np.eye(1, dtype=complex), np.eye(1, dtype=complex))]

    w, v = np.linalg.eigh(0.5 * (mat + mat.conj().T))
    top = w[::-1][:k]
    spread = float(np.max(np.abs(top - 1.0 / k)) * k)
    if spread > tols.equal_coeff:
        raise _StepFailure(
            "equal-eigenvalues",
            f"top-{k} eigenvalues deviate from 1/k by relative {spread:.3e}",
            {"spread": spread},
        )
    eigvecs = v[:, ::-1][:, :k]

    combo = _rank_deficient_eigenvector(eigvecs, k, tols.rank)
    u, s, vh = np.linalg.svd(combo.reshape(k, k))
    m = int(np.sum(s > tols.rank * s[0]))
    if not 0 < m < k:
        raise _StepFailure("rank-deficiency", f"combined eigenvector has rank {m}", {})

    basis_v = u[:, :m]
    proj_v = basis_v @ basis_v.conj().T
    rr = basis_v @ np.diag(s[:m] ** 2) @ basis_v.conj().T

    state = BipartiteOperator(mat, k, k)
    gx = g_apply(state, rr).mat
    wg, vg = np.linalg.eigh(0.5 * (gx + gx.conj().T))
    top_g = max(float(wg[-1]), np.finfo(float).tiny)
    keep = wg > tols.rank * top_g
    if int(np.sum(keep)) != m:
        raise _StepFailure(
            "image-rank",
            f"image of the split eigenvector has rank {int(np.sum(keep))}, expected {m}",
            {},
        )
    basis_w = vg[:, keep]
    proj_w = basis_w @ basis_w.conj().T
    basis_v_perp = u[:, m:]
    basis_w_perp = vg[:, ~keep]

    s1 = np.kron(proj_v, proj_w)
    s2 = np.kron(np.eye(k) - proj_v, np.eye(k) - proj_w)
    block_1 = s1 @ mat @ s1.conj().T
    block_2 = s2 @ mat @ s2.conj().T
    residual = float(np.linalg.norm(mat - block_1 - block_2))
    if residual > tols.split * max(float(np.linalg.norm(mat)), 1e-300):
        raise _StepFailure("split", f"split residual {residual:.3e}", {"residual": residual})

    terms = []
    for block, ba, bb in (
        (block_1, basis_v, basis_w),
        (block_2, basis_v_perp, basis_w_perp),
    ):
        weight = float(np.trace(block).real)
        if weight <= 1e-12:
            continue
        child = _compress_block(block, ba, bb) / weight
        for wt, x, y in _extract_normal_form(child, ba.shape[1], tols):
            terms.append((weight * wt, ba @ x @ ba.conj().T, bb @ y @ bb.conj().T))
    return terms


def minimal_rank_extract(
    gamma: BipartiteOperator,
    classification: TriadClassification,
    tols: Tolerances = DEFAULT,
) -> SeparableDecomposition | ExtractionFailure:
    """Constructive separable decomposition of a minimal-rank triad state.

    Preconditions: at least one triad flag, and the state's rank equals both
    reduced ranks equals the local dimension k.  The state is filtered to
    identity marginals (with the filter mode matching its class), its k
    nonzero eigenvalues are verified to equal 1/k, and the split recursion
    peels off product blocks; the filters are undone at the end.  Tolerance
    failures inside the recursion come back as an ExtractionFailure naming
    the failing step.
    """
    if not classification.any_flag:
        raise PreconditionNotMet("extraction needs at least one triad flag")
    if gamma.dim_a != gamma.dim_b:
        raise DimensionMismatch("extraction requires equal factor dimensions")
    k = gamma.dim_a
    rb_report = rank_bound_check(gamma, classification, tols)
    if rb_report.rank != k or rb_report.reduced_ranks != (k, k):
        raise PreconditionNotMet(
            f"extraction needs rank = reduced ranks = k = {k}, got rank "
            f"{rb_report.rank} and reduced ranks {rb_report.reduced_ranks}"
        )

    if classification.spc:
        mode = "symmetric"
    elif classification.invariant:
        mode = "conjugate"
    else:
        mode = "general"
    fr = sinkhorn_filter(gamma, mode, filter_tol=tols.filter, max_iter=10_000, tols=tols)
    if not fr.converged:
        return ExtractionFailure(
            step="filter",
            detail=f"{mode} filter did not converge in {fr.iterations} iterations",
            residuals={
                "marginal_residual_a": fr.marginal_residual_a,
                "marginal_residual_b": fr.marginal_residual_b,
            },
        )

    delta = fr.normal_form.mat
    try:
        raw_terms = _extract_normal_form(delta, k, tols)
    except _StepFailure as exc:
        return ExtractionFailure(step=exc.step, detail=exc.detail, residuals=exc.residuals)

    fa_inv = np.linalg.inv(fr.filter_a.mat)
    fb_inv = np.linalg.inv(fr.filter_b.mat if fr.filter_b is not None else np.eye(k))
    gn = 0.5 * (gamma.mat + gamma.mat.conj().T)
    gn = gn / np.trace(gn).real

    terms: list[tuple[float, LocalOperator, LocalOperator]] = []
    total = np.zeros_like(gn)
    for wt, x, y in raw_terms:
        xp = fa_inv @ x @ fa_inv.conj().T
        yp = fb_inv @ y @ fb_inv.conj().T
        tx, ty = np.trace(xp).real, np.trace(yp).real
        weight = float(wt * tx * ty)
        xp = 0.5 * (xp + xp.conj().T) / tx
        yp = 0.5 * (yp + yp.conj().T) / ty
        total += weight * np.kron(xp, yp)
        terms.append((weight, LocalOperator(xp), LocalOperator(yp)))
    residual = float(np.linalg.norm(total - gn))
    if residual > tols.separable * max(1.0, float(np.linalg.norm(gn))):
        return ExtractionFailure(
            step="reconstruction",
            detail=f"undoing the filters left residual {residual:.3e}",
            residuals={"residual": residual},
        )
    terms.sort(key=lambda t: -t[0])
    return SeparableDecomposition(terms=terms, reconstruction_residual=residual)
