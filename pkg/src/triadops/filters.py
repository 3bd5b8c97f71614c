"""Filter normal forms via iterative marginal scaling, plus map diagnostics.

A filter normal form of a state is a locally transformed representative
whose reduced states are both Id/k.  Four modes are provided:

    general     independent invertible filters on the two factors,
                alternating exact one-sided normalizations
    symmetric   one filter applied to both factors (valid for SPC states,
                whose two marginals coincide); the output stays SPC
    conjugate   one filter on the first factor and its conjugate on the
                second (valid for realignment-invariant states); the output
                stays invariant
    left        one filter on the first factor only, followed by a
                bi-orthogonal expansion whose leading left operator is
                Id/sqrt(k) with the largest coefficient

The symmetric and conjugate updates scale both factors at once, so they use
the damped step Q = (k * marginal)^(-1/4); the undamped inverse square root
overshoots and cycles with period two already on diagonal states.  The
damping does not move the fixed points.

Convergence monitor: the trace of the scaled iterate before renormalization.
It equals 1 exactly at a fixed point; its deficiency (1 - trace) is logged
per iteration and is non-increasing along the run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .contractions import flip, realign, star_product
from .criteria import classify
from .errors import (
    DimensionMismatch,
    MarginalRankDeficient,
    NotHermitian,
    NotPSD,
    PreconditionNotMet,
    WrongClassForMode,
)
from .schmidt_maps import (
    SchmidtDecomposition,
    f_apply,
    fg_matrix,
    g_apply,
    g_matrix,
    hermitian_from_coords,
    schmidt,
)
from .tensor_core import BipartiteOperator, LocalOperator, psd_check
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "FilterResult",
    "StochasticityReport",
    "ProbeResult",
    "sinkhorn_filter",
    "doubly_stochastic_check",
    "fully_indecomposable_probe",
]

MODES = ("general", "symmetric", "conjugate", "left")
_COND_LIMIT = 1e12


@dataclass(frozen=True)
class FilterResult:
    """Outcome of a filtering run.

    ``normal_form`` equals (filter_a (x) filter_b) applied to the
    trace-normalized input as a congruence (M . M*), with filter_b = Id in
    left mode.  ``class_residual`` quantifies how well the output keeps its
    class shape: the SPC defect in symmetric mode, the realignment distance
    in conjugate mode, and the identity-eigenvector defect of the composite
    contraction map in left mode.  In left mode the marginal residuals refer
    to the internally scaled star-product object whose convergence defines
    the mode, not to ``normal_form`` itself (a one-sided filter does not make
    both marginals Id/k).
    """

    mode: str
    filter_a: LocalOperator
    filter_b: LocalOperator | None
    normal_form: BipartiteOperator
    marginal_residual_a: float
    marginal_residual_b: float
    iterations: int
    converged: bool
    schmidt_of_normal_form: SchmidtDecomposition
    class_residual: float | None = None
    iteration_log: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "filter_a": self.filter_a.to_json(),
            "filter_b": None if self.filter_b is None else self.filter_b.to_json(),
            "normal_form": self.normal_form.to_json(),
            "marginal_residual_a": self.marginal_residual_a,
            "marginal_residual_b": self.marginal_residual_b,
            "iterations": self.iterations,
            "converged": self.converged,
            "class_residual": self.class_residual,
            "schmidt_of_normal_form": self.schmidt_of_normal_form.to_json(),
            "iteration_log": self.iteration_log,
        }


def _marginal_a(mat: np.ndarray, k: int) -> np.ndarray:
    return np.einsum("ijpj->ip", mat.reshape(k, k, k, k))


def _marginal_b(mat: np.ndarray, k: int) -> np.ndarray:
    return np.einsum("ijiq->jq", mat.reshape(k, k, k, k))


def _guarded_eigh(marginal: np.ndarray, side: str, rank_tol: float) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(0.5 * (marginal + marginal.conj().T))
    if w[0] <= rank_tol * w[-1] or w[-1] <= 0:
        raise MarginalRankDeficient(
            f"{side}-marginal eigenvalue {w[0]:.3e} fell below the rank threshold"
        )
    if w[-1] / w[0] > _COND_LIMIT:
        raise MarginalRankDeficient(
            f"{side}-marginal condition number {w[-1] / w[0]:.3e} exceeds {_COND_LIMIT:.0e}"
        )
    return w, v


def _inv_power(marginal: np.ndarray, k: int, power: float, side: str, rank_tol: float) -> np.ndarray:
    """(k * marginal)^(-power) through the guarded eigendecomposition."""
    w, v = _guarded_eigh(marginal, side, rank_tol)
    out = (v * (k * w) ** (-power)) @ v.conj().T
    return 0.5 * (out + out.conj().T)


def _scaling_engine(
    mat: np.ndarray,
    k: int,
    mode: str,
    filter_tol: float,
    max_iter: int,
    rank_tol: float,
):
    """Iterate marginal scalings until both reduced states are Id/k.

    Returns (delta, fa, fb, iterations, converged, log) with
    delta = (fa (x) fb) mat_normalized (fa (x) fb)^* exactly.
    """
    delta = mat / np.trace(mat).real
    fa = np.eye(k, dtype=complex)
    fb = np.eye(k, dtype=complex)
    eye_k = np.eye(k) / k
    log: list[dict] = []
    converged = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        ga = _marginal_a(delta, k)
        gb = _marginal_b(delta, k)
        res_a = float(np.linalg.norm(ga - eye_k))
        res_b = float(np.linalg.norm(gb - eye_k))
        if max(res_a, res_b) <= filter_tol:
            converged = True
            iterations -= 1
            break

        if mode == "general":
            pa = _inv_power(ga, k, 0.5, "A", rank_tol)
            delta = np.kron(pa, np.eye(k)) @ delta @ np.kron(pa, np.eye(k)).conj().T
            t1 = np.trace(delta).real
            delta /= t1
            fa = pa @ fa / np.sqrt(t1)
            gb = _marginal_b(delta, k)
            pb = _inv_power(gb, k, 0.5, "B", rank_tol)
            delta = np.kron(np.eye(k), pb) @ delta @ np.kron(np.eye(k), pb).conj().T
            t2 = np.trace(delta).real
            delta /= t2
            fb = pb @ fb / np.sqrt(t2)
            monitor = max(abs(1.0 - t1), abs(1.0 - t2))
        else:
            q = _inv_power(ga, k, 0.25, "A", rank_tol)
            qb = q.conj() if mode == "conjugate" else q
            big = np.kron(q, qb)
            delta = big @ delta @ big.conj().T
            t = np.trace(delta).real
            delta /= t
            scale = t ** 0.25
            fa = q @ fa / scale
            fb = qb @ fb / scale
            monitor = 1.0 - t

        delta = 0.5 * (delta + delta.conj().T)
        log.append(
            {"iteration": iterations, "residual_a": res_a, "residual_b": res_b, "monitor": monitor}
        )

    ga = _marginal_a(delta, k)
    gb = _marginal_b(delta, k)
    res_a = float(np.linalg.norm(ga - eye_k))
    res_b = float(np.linalg.norm(gb - eye_k))
    return delta, fa, fb, iterations, converged, log, res_a, res_b


def _identity_aligned_expansion(
    normal_form: BipartiteOperator, tols: Tolerances
) -> tuple[SchmidtDecomposition, float]:
    """Schmidt data of a normal form through the composite map's eigenbasis.

    Exact eigenvectors of the numerical composite matrix make both operator
    families orthonormal by construction, and the identity direction (an
    eigenvector of any converged normal form, possibly inside a degenerate
    cluster where a plain SVD would pick an arbitrary basis) is rotated to
    the front of its cluster.  Returns the expansion and the residual of the
    identity as an eigenvector.
    """
    k = normal_form.dim_a
    mg = g_matrix(normal_form, tols).matrix
    mfg = mg.T @ mg
    mfg = 0.5 * (mfg + mfg.T)
    n = k * k
    e0 = np.zeros(n)
    e0[0] = 1.0
    id_defect = float(np.linalg.norm(mfg[:, 0] - mfg[0, 0] * e0))

    w, v = np.linalg.eigh(mfg)
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    jstar = int(np.argmax(np.abs(v[0, :])))
    scale = max(float(w[0]), np.finfo(float).tiny)
    cluster = np.nonzero(np.abs(w - w[jstar]) <= 1e-8 * scale)[0]
    block = v[:, cluster]
    proj = block @ (block.T @ e0)
    if np.linalg.norm(proj) > 1e-6:
        basis = [proj / np.linalg.norm(proj)]
        for col in range(block.shape[1]):
            cand = block[:, col]
            for b in basis:
                cand = cand - (b @ cand) * b
            nrm = np.linalg.norm(cand)
            if nrm > 1e-8 and len(basis) < block.shape[1]:
                basis.append(cand / nrm)
        v[:, cluster] = np.column_stack(basis)

    coeffs, coord_list = [], []
    a_top = float(np.sqrt(max(w[0], 0.0)))
    for i in range(n):
        a = float(np.sqrt(max(w[i], 0.0)))
        if a <= tols.rank * max(a_top, np.finfo(float).tiny):
            break
        c = v[:, i]
        pivot = int(np.argmax(np.abs(c)))
        if c[pivot] < 0:
            c = -c
        coeffs.append(a)
        coord_list.append(c)

    lefts, rights = [], []
    for a, c in zip(coeffs, coord_list):
        left = hermitian_from_coords(c, k)
        image = g_apply(normal_form, left).mat
        lefts.append(LocalOperator(0.5 * (left + left.conj().T)))
        rights.append(LocalOperator(0.5 * (image + image.conj().T) / a))
    expansion = SchmidtDecomposition(
        coefficients=np.asarray(coeffs), left_ops=lefts, right_ops=rights
    )
    return expansion, id_defect


def _spc_defect(op: BipartiteOperator) -> float:
    """Hermiticity defect plus negative part of realign(partial transpose)."""
    k = op.dim_a
    rpt = realign(
        BipartiteOperator(op.tensor4.transpose(0, 3, 2, 1).reshape(k * k, k * k), k, k)
    ).mat
    herm = float(np.linalg.norm(rpt - rpt.conj().T))
    min_eig = float(np.linalg.eigvalsh(0.5 * (rpt + rpt.conj().T))[0])
    return herm + max(0.0, -min_eig)


def sinkhorn_filter(
    gamma: BipartiteOperator,
    mode: str = "general",
    filter_tol: float = DEFAULT.filter,
    max_iter: int = 10_000,
    tols: Tolerances = DEFAULT,
) -> FilterResult:
    """Bring a full-marginal-rank state to its filter normal form.

    The input is trace-normalized first.  Symmetric mode requires an SPC
    input and conjugate mode a realignment-invariant one (WrongClassForMode
    otherwise); every mode requires both reduced states to have full rank.
    Runs that exhaust ``max_iter`` return their partial result with
    ``converged=False`` instead of raising, since decomposable inputs may
    cycle and the iteration log is useful evidence.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if gamma.dim_a != gamma.dim_b:
        raise DimensionMismatch("filtering requires equal factor dimensions")
    report = psd_check(gamma, tols.psd, tols)
    if not report.is_psd:
        raise NotPSD(f"filter input has min eigenvalue {report.min_eigenvalue:.3e}")
    k = gamma.dim_a
    mat = 0.5 * (gamma.mat + gamma.mat.conj().T)
    mat = mat / np.trace(mat).real
    _guarded_eigh(_marginal_a(mat, k), "A", tols.rank)
    _guarded_eigh(_marginal_b(mat, k), "B", tols.rank)

    if mode == "symmetric" and not classify(gamma, tols).spc:
        raise WrongClassForMode("symmetric mode needs an SPC input")
    if mode == "conjugate" and not classify(gamma, tols).invariant:
        raise WrongClassForMode("conjugate mode needs a realignment-invariant input")

    if mode == "left":
        return _left_filter(mat, k, filter_tol, max_iter, tols)

    delta, fa, fb, iterations, converged, log, res_a, res_b = _scaling_engine(
        mat, k, mode, filter_tol, max_iter, tols.rank
    )
    normal_form = BipartiteOperator(delta, k, k)
    if mode == "symmetric":
        class_residual = _spc_defect(normal_form)
    elif mode == "conjugate":
        class_residual = float(np.linalg.norm(realign(normal_form).mat - delta))
    else:
        class_residual = None
    if mode == "general":
        # no identity structure is guaranteed here; plain SVD data
        expansion = schmidt(normal_form, tols)
    else:
        expansion, _ = _identity_aligned_expansion(normal_form, tols)
    return FilterResult(
        mode=mode,
        filter_a=LocalOperator(fa),
        filter_b=LocalOperator(fb),
        normal_form=normal_form,
        marginal_residual_a=res_a,
        marginal_residual_b=res_b,
        iterations=iterations,
        converged=converged,
        schmidt_of_normal_form=expansion,
        class_residual=class_residual,
        iteration_log=log,
    )


def _left_filter(
    mat: np.ndarray, k: int, filter_tol: float, max_iter: int, tols: Tolerances
) -> FilterResult:
    """One-sided filter with a bi-orthogonal Hermitian expansion.

    The conjugate-mode engine is run on the star product of the state with
    its flip-conjugated complex conjugate (whose realignment is PSD by
    construction), the resulting filter is applied to the first factor only,
    and the expansion is read off the eigenbasis of the composite
    contraction map, which by construction fixes the identity direction.
    """
    f = flip(k).mat
    state = BipartiteOperator(mat, k, k)
    conj_flipped = BipartiteOperator(f @ mat.conj() @ f, k, k)
    omega = star_product(state, conj_flipped).mat
    omega = 0.5 * (omega + omega.conj().T)

    _, qa, _, iterations, converged, log, res_a, res_b = _scaling_engine(
        omega, k, "conjugate", filter_tol, max_iter, tols.rank
    )

    raw = np.kron(qa, np.eye(k)) @ mat @ np.kron(qa, np.eye(k)).conj().T
    t = np.trace(raw).real
    delta = 0.5 * (raw + raw.conj().T) / t
    fa = qa / np.sqrt(t)
    normal_form = BipartiteOperator(delta, k, k)
    expansion, id_defect = _identity_aligned_expansion(normal_form, tols)

    return FilterResult(
        mode="left",
        filter_a=LocalOperator(fa),
        filter_b=None,
        normal_form=normal_form,
        marginal_residual_a=res_a,
        marginal_residual_b=res_b,
        iterations=iterations,
        converged=converged,
        schmidt_of_normal_form=expansion,
        class_residual=id_defect,
        iteration_log=log,
    )


@dataclass(frozen=True)
class StochasticityReport:
    forward_residual: float
    adjoint_residual: float
    doubly_stochastic: bool

    def to_json(self) -> dict:
        return {
            "forward_residual": self.forward_residual,
            "adjoint_residual": self.adjoint_residual,
            "doubly_stochastic": self.doubly_stochastic,
        }


def doubly_stochastic_check(
    gamma: BipartiteOperator, tols: Tolerances = DEFAULT
) -> StochasticityReport:
    """Test whether the state's contraction maps fix the normalized identity.

    The state is trace-normalized, under which convention both contraction
    maps applied to Id must return Id/k; the residuals are measured in the
    Id/sqrt(k) normalization on both the forward map and its adjoint.
    """
    if gamma.dim_a != gamma.dim_b:
        raise DimensionMismatch("doubly stochastic check requires equal factor dimensions")
    mat = gamma.mat
    defect = np.linalg.norm(mat - mat.conj().T)
    if defect > tols.herm * max(np.linalg.norm(mat), np.finfo(float).tiny):
        raise NotHermitian(f"Hermiticity defect {defect:.3e}")
    trace = np.trace(mat).real
    if abs(trace) < 1e-14:
        raise PreconditionNotMet("trace too small to normalize")
    k = gamma.dim_a
    gn = BipartiteOperator(0.5 * (mat + mat.conj().T) / trace, k, k)
    v = np.eye(k) / np.sqrt(k)
    forward = float(np.linalg.norm(k * g_apply(gn, v).mat - v))
    adjoint = float(np.linalg.norm(k * f_apply(gn, v).mat - v))
    ds = bool(forward <= tols.doubly_stochastic and adjoint <= tols.doubly_stochastic)
    return StochasticityReport(
        forward_residual=forward, adjoint_residual=adjoint, doubly_stochastic=ds
    )


@dataclass(frozen=True)
class ProbeResult:
    verdict: str  # "indecomposable_likely" | "decomposable_witness" | "inconclusive"
    witness: tuple[LocalOperator, LocalOperator] | None
    probes_run: int

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": None
            if self.witness is None
            else [self.witness[0].to_json(), self.witness[1].to_json()],
            "probes_run": self.probes_run,
        }


def _numerical_rank(mat: np.ndarray, rank_tol: float) -> tuple[int, bool]:
    """Rank by eigenvalue thresholding; flags borderline threshold calls."""
    w = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))
    top = max(float(w[-1]), 0.0)
    if top == 0.0:
        return 0, False
    cut = rank_tol * top
    borderline = bool(np.any((np.abs(w) > 0.1 * cut) & (np.abs(w) < 10.0 * cut)))
    return int(np.sum(w > cut)), borderline


def fully_indecomposable_probe(
    gamma: BipartiteOperator,
    trials: int = 50,
    seed: int = 0,
    tols: Tolerances = DEFAULT,
) -> ProbeResult:
    """Randomized search for a decomposability witness of the contraction map.

    A witness is a pair of nonzero PSD operators X, Y with
    tr(g_apply(gamma, X) Y) = 0 and rank(X) + rank(Y) >= k; it exists exactly
    when some singular PSD X has rank(g_apply(gamma, X)) <= rank(X), in which
    case Y is the projector onto the image's orthogonal complement.  Probes
    are the spectral projections of the eigenvectors of the composite map's
    Hermitian-basis matrix plus ``trials`` random singular PSD draws.  The
    verdict is never a proof: all probes passing the rank-increase check only
    makes indecomposability likely, and borderline rank calls downgrade the
    verdict to inconclusive.
    """
    report = psd_check(gamma, tols.psd, tols)
    if not report.is_psd:
        raise NotPSD(f"probe input has min eigenvalue {report.min_eigenvalue:.3e}")
    if gamma.dim_a != gamma.dim_b:
        raise DimensionMismatch("probe requires equal factor dimensions")
    k = gamma.dim_a

    candidates: list[np.ndarray] = []
    mfg = fg_matrix(gamma, tols).matrix
    _, vecs = np.linalg.eigh(mfg)
    for col in range(vecs.shape[1]):
        x = hermitian_from_coords(vecs[:, col], k)
        w, v = np.linalg.eigh(x)
        scale = float(np.max(np.abs(w)))
        if scale == 0.0:
            continue
        # projectors onto each eigenvalue cluster, plus the positive and
        # negative parts
        groups: list[list[int]] = []
        for i, wi in enumerate(w):
            if groups and abs(wi - w[groups[-1][-1]]) <= 1e-8 * scale:
                groups[-1].append(i)
            else:
                groups.append([i])
        for grp in groups:
            if abs(w[grp[0]]) > 1e-8 * scale:
                candidates.append(v[:, grp] @ v[:, grp].conj().T)
        for sign in (1.0, -1.0):
            sel = sign * w > 1e-8 * scale
            if 0 < np.sum(sel):
                candidates.append(v[:, sel] @ v[:, sel].conj().T)

    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    for _ in range(trials):
        r = int(rng.integers(1, k)) if k > 1 else 1
        g = (rng.standard_normal((k, r)) + 1j * rng.standard_normal((k, r))) / np.sqrt(2)
        candidates.append(g @ g.conj().T)

    probes_run = 0
    saw_borderline = False
    for x in candidates:
        x = 0.5 * (x + x.conj().T)
        rank_x, bx = _numerical_rank(x, tols.rank)
        if not 0 < rank_x < k:
            continue
        probes_run += 1
        gx = g_apply(gamma, x).mat
        rank_gx, bg = _numerical_rank(gx, tols.rank)
        saw_borderline = saw_borderline or bx or bg
        if rank_gx <= rank_x:
            w, v = np.linalg.eigh(0.5 * (gx + gx.conj().T))
            top = max(float(w[-1]), np.finfo(float).tiny)
            kernel = v[:, w <= tols.rank * top]
            y = kernel @ kernel.conj().T
            return ProbeResult(
                verdict="decomposable_witness",
                witness=(LocalOperator(x), LocalOperator(y)),
                probes_run=probes_run,
            )
    verdict = "inconclusive" if saw_borderline else "indecomposable_likely"
    return ProbeResult(verdict=verdict, witness=None, probes_run=probes_run)
