"""Triad classification (PPT / SPC / invariant) and spectral-radius bounds.

The three classes tested here, for a state gamma on C^k (x) C^k:

    ppt        both gamma and its partial transpose are PSD
    spc        realign(partial_transpose(gamma)) is Hermitian PSD
    invariant  realign(gamma) = gamma

Every PSD gamma obeys two unconditional operator-norm bounds (on the partial
transpose and on the realignment), and membership in any of the three classes
promotes the first bound to gamma itself.  ``ccnr_value`` is the trace norm
of the realignment; exceeding 1 on a state certifies entanglement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contractions import partial_transpose, realign
from .errors import DimensionMismatch, NotAState, NotPSD, PreconditionNotMet
from .tensor_core import BipartiteOperator, norms, psd_check
from .schmidt_maps import reduced_a, reduced_b
from .tolerances import DEFAULT, Tolerances

__all__ = [
    "TriadResiduals",
    "TriadClassification",
    "BoundReport",
    "PptPairReport",
    "classify",
    "ccnr_entanglement_flag",
    "bound_gamma_pt",
    "bound_realign_sq",
    "bound_triad",
    "ppt_pair_forces_invariance",
]

_TRACE_TOL = 1e-8


@dataclass(frozen=True)
class TriadResiduals:
    """Numerical evidence behind each flag."""

    ppt_min_eigenvalue: float        # min eig of the partial transpose
    spc_min_eigenvalue: float        # min eig of Herm(realign(partial transpose))
    spc_hermiticity_defect: float    # ||R(g^PT) - R(g^PT)^*|| / ||gamma||
    invariance_distance: float       # ||realign(g) - g||_F

    def to_json(self) -> dict:
        return {
            "ppt_min_eigenvalue": self.ppt_min_eigenvalue,
            "spc_min_eigenvalue": self.spc_min_eigenvalue,
            "spc_hermiticity_defect": self.spc_hermiticity_defect,
            "invariance_distance": self.invariance_distance,
        }


@dataclass(frozen=True)
class TriadClassification:
    is_state: bool
    ppt: bool
    spc: bool
    invariant: bool
    ccnr_value: float
    residuals: TriadResiduals

    @property
    def any_flag(self) -> bool:
        return self.ppt or self.spc or self.invariant

    def to_json(self) -> dict:
        return {
            "is_state": self.is_state,
            "ppt": self.ppt,
            "spc": self.spc,
            "invariant": self.invariant,
            "ccnr_value": self.ccnr_value,
            "residuals": self.residuals.to_json(),
        }


def _min_eig_hermitian_part(mat: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))[0])


def classify(gamma: BipartiteOperator, tols: Tolerances = DEFAULT) -> TriadClassification:
    """Evaluate all three class flags and the CCNR value in one pass."""
    if gamma.dim_a != gamma.dim_b:
        raise DimensionMismatch("classification is defined for equal factor dimensions")
    mat = gamma.mat
    scale = float(np.linalg.norm(mat))
    tiny = np.finfo(float).tiny
    herm_defect = float(np.linalg.norm(mat - mat.conj().T))
    is_hermitian = herm_defect <= tols.herm * max(scale, tiny)

    min_eig = _min_eig_hermitian_part(mat)
    op_norm = float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (mat + mat.conj().T)))))
    is_psd = min_eig >= -tols.psd * max(1.0, op_norm)
    is_state = bool(
        is_hermitian and is_psd and abs(np.trace(mat).real - 1.0) <= _TRACE_TOL
    )

    pt = partial_transpose(gamma)
    ppt_min = _min_eig_hermitian_part(pt.mat)
    ppt = bool(is_psd and ppt_min >= -tols.psd * max(1.0, op_norm))

    rpt = realign(pt).mat
    spc_defect = float(np.linalg.norm(rpt - rpt.conj().T)) / max(scale, tiny)
    spc_min = _min_eig_hermitian_part(rpt)
    spc = bool(
        is_psd
        and spc_defect <= tols.herm
        and spc_min >= -tols.psd * max(1.0, op_norm)
    )

    r = realign(gamma).mat
    inv_dist = float(np.linalg.norm(r - mat))
    invariant = bool(is_psd and inv_dist <= tols.invariance * max(scale, tiny))

    ccnr = float(np.sum(np.linalg.svd(r, compute_uv=False)))
    return TriadClassification(
        is_state=is_state,
        ppt=ppt,
        spc=spc,
        invariant=invariant,
        ccnr_value=ccnr,
        residuals=TriadResiduals(
            ppt_min_eigenvalue=ppt_min,
            spc_min_eigenvalue=spc_min,
            spc_hermiticity_defect=spc_defect,
            invariance_distance=inv_dist,
        ),
    )


def ccnr_entanglement_flag(gamma: BipartiteOperator, tols: Tolerances = DEFAULT) -> bool:
    """True when the realignment's trace norm strictly exceeds 1.

    Sound but not complete: True certifies entanglement of the state, False
    decides nothing.  Raises NotAState unless gamma is PSD with unit trace.
    """
    report = psd_check(gamma, tols.psd, tols)
    if not report.is_psd or abs(np.trace(gamma.mat).real - 1.0) > _TRACE_TOL:
        raise NotAState("CCNR flag is defined for trace-one PSD inputs")
    if gamma.dim_a != gamma.dim_b:
        raise DimensionMismatch("CCNR flag requires equal factor dimensions")
    ccnr = float(np.sum(np.linalg.svd(realign(gamma).mat, compute_uv=False)))
    return bool(ccnr > 1.0 + tols.ccnr)


@dataclass(frozen=True)
class BoundReport:
    """Operator-norm comparison for one of the spectral bounds.

    ``margin`` is the amount by which the bound holds (negative means a
    violation): the right-hand side minus the bounded quantity.  For the
    min-form bounds this is min(op_norm_a, op_norm_b, op_norm_realign) -
    op_norm_state; for the squared realignment bound it is
    op_norm_a * op_norm_b - op_norm_realign**2.
    """

    op_norm_state: float
    op_norm_a: float
    op_norm_b: float
    op_norm_realign: float
    bound_holds: bool
    margin: float

    def to_json(self) -> dict:
        return {
            "op_norm_state": self.op_norm_state,
            "op_norm_a": self.op_norm_a,
            "op_norm_b": self.op_norm_b,
            "op_norm_realign": self.op_norm_realign,
            "bound_holds": self.bound_holds,
            "margin": self.margin,
        }


def _bound_ingredients(gamma: BipartiteOperator) -> tuple[float, float, float]:
    na = norms(reduced_a(gamma)).operator_norm
    nb = norms(reduced_b(gamma)).operator_norm
    nr = norms(realign(gamma)).operator_norm
    return na, nb, nr


def _require_psd(gamma: BipartiteOperator, tols: Tolerances) -> None:
    report = psd_check(gamma, tols.psd, tols)
    if not report.is_psd:
        raise NotPSD(f"input has min eigenvalue {report.min_eigenvalue:.3e}")


def bound_gamma_pt(gamma: BipartiteOperator, tols: Tolerances = DEFAULT) -> BoundReport:
    """Bound the partial transpose's operator norm by the three right-hand norms.

    Holds for every PSD input; the margin quantifies the slack.
    """
    if gamma.dim_a != gamma.dim_b:
        raise DimensionMismatch("bound requires equal factor dimensions")
    _require_psd(gamma, tols)
    na, nb, nr = _bound_ingredients(gamma)
    lhs = norms(partial_transpose(gamma)).operator_norm
    margin = min(na, nb, nr) - lhs
    return BoundReport(
        op_norm_state=lhs,
        op_norm_a=na,
        op_norm_b=nb,
        op_norm_realign=nr,
        bound_holds=bool(margin >= -tols.psd),
        margin=float(margin),
    )


def bound_realign_sq(gamma: BipartiteOperator, tols: Tolerances = DEFAULT) -> BoundReport:
    """Bound the squared realignment norm by the product of marginal norms."""
    if gamma.dim_a != gamma.dim_b:
        raise DimensionMismatch("bound requires equal factor dimensions")
    _require_psd(gamma, tols)
    na, nb, nr = _bound_ingredients(gamma)
    margin = na * nb - nr * nr
    return BoundReport(
        op_norm_state=nr,
        op_norm_a=na,
        op_norm_b=nb,
        op_norm_realign=nr,
        bound_holds=bool(margin >= -tols.psd),
        margin=float(margin),
    )


def bound_triad(
    gamma: BipartiteOperator,
    classification: TriadClassification,
    tols: Tolerances = DEFAULT,
) -> BoundReport:
    """Bound the state's own operator norm, valid when any triad flag is set."""
    if not classification.any_flag:
        raise PreconditionNotMet(
            "the operator-norm bound on the state itself needs at least one triad flag"
        )
    na, nb, nr = _bound_ingredients(gamma)
    lhs = norms(gamma).operator_norm
    margin = min(na, nb, nr) - lhs
    return BoundReport(
        op_norm_state=lhs,
        op_norm_a=na,
        op_norm_b=nb,
        op_norm_realign=nr,
        bound_holds=bool(margin >= -tols.psd),
        margin=float(margin),
    )


@dataclass(frozen=True)
class PptPairReport:
    both_ppt: bool
    realign_distance: float

    def to_json(self) -> dict:
        return {"both_ppt": self.both_ppt, "realign_distance": self.realign_distance}


def ppt_pair_forces_invariance(
    gamma: BipartiteOperator, tols: Tolerances = DEFAULT
) -> PptPairReport:
    """Report whether gamma and realign(gamma) are both PPT, and their distance.

    When both are PPT the distance must vanish up to numerical noise, i.e. the
    state is invariant under realignment.  The function only reports; asserting
    the implication is the caller's (or the test suite's) job.
    """
    if gamma.dim_a != gamma.dim_b:
        raise DimensionMismatch("requires equal factor dimensions")
    _require_psd(gamma, tols)
    op_norm = norms(gamma).operator_norm
    thresh = -tols.psd * max(1.0, op_norm)

    gamma_ppt = _min_eig_hermitian_part(partial_transpose(gamma).mat) >= thresh
    r = realign(gamma)
    scale = max(float(np.linalg.norm(gamma.mat)), np.finfo(float).tiny)
    r_herm = float(np.linalg.norm(r.mat - r.mat.conj().T)) <= tols.herm * scale
    r_psd = _min_eig_hermitian_part(r.mat) >= thresh
    r_ppt = _min_eig_hermitian_part(partial_transpose(r).mat) >= thresh

    both = bool(gamma_ppt and r_herm and r_psd and r_ppt)
    dist = float(np.linalg.norm(r.mat - gamma.mat))
    return PptPairReport(both_ppt=both, realign_distance=dist)
