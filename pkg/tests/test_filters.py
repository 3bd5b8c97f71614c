import numpy as np
import pytest

from triadops import (
    BipartiteOperator,
    LocalOperator,
    canonical,
    classify,
    doubly_stochastic_check,
    fully_indecomposable_probe,
    g_apply,
    kron,
    random_density,
    random_invariant,
    random_spc,
    realign,
    rng_from_seed,
    sinkhorn_filter,
)
from triadops.errors import (
    DimensionMismatch,
    MarginalRankDeficient,
    NotHermitian,
    NotPSD,
    WrongClassForMode,
)

from conftest import local_scale, random_pd_local


@pytest.mark.parametrize("mode", ["general", "symmetric", "conjugate"])
def test_classical_diag_already_normal(mode, classical_diag2):
    fr = sinkhorn_filter(classical_diag2, mode)
    assert fr.converged and fr.iterations <= 1
    assert np.allclose(fr.normal_form.mat, classical_diag2.mat)
    # the filter is a scalar multiple of the identity
    fa = fr.filter_a.mat
    assert np.allclose(fa, fa[0, 0] * np.eye(2))


def test_prescaled_classical_diag_recovers_filter(classical_diag2):
    d = np.diag([2.0, 1.0])
    scaled = local_scale(classical_diag2, d, d)
    fr = sinkhorn_filter(scaled, "symmetric")
    assert fr.converged
    assert np.linalg.norm(fr.normal_form.mat - classical_diag2.mat) <= 1e-8
    ratio = fr.filter_a.mat @ d
    ratio /= ratio[0, 0]
    assert np.linalg.norm(ratio - np.eye(2)) <= 1e-7
    assert fr.marginal_residual_a <= 1e-8 and fr.marginal_residual_b <= 1e-8
    assert fr.class_residual <= 1e-8


def test_identity_plus_u_conjugate(identity_plus_u2):
    fr = sinkhorn_filter(identity_plus_u2, "conjugate")
    assert fr.converged and fr.iterations == 0
    assert np.allclose(fr.normal_form.mat, identity_plus_u2.mat)
    assert fr.class_residual <= 1e-12


def _scaled_spc(k, seed):
    g = random_spc(k, seed)
    rng = rng_from_seed(900 + seed)
    s = random_pd_local(rng, k)
    return local_scale(g, s, s)


def _scaled_invariant(k, seed):
    g = random_invariant(k, seed)
    rng = rng_from_seed(800 + seed)
    s = random_pd_local(rng, k)
    return local_scale(g, s, s.conj())


@pytest.mark.parametrize("k", [2, 3])
def test_symmetric_mode_random_spc(k):
    for seed in range(15):
        op = _scaled_spc(k, seed)
        assert classify(op).spc
        fr = sinkhorn_filter(op, "symmetric")
        assert fr.converged
        assert fr.marginal_residual_a <= 1e-9 and fr.marginal_residual_b <= 1e-9
        assert fr.class_residual <= 1e-8
        assert np.array_equal(fr.filter_a.mat, fr.filter_b.mat)
        sd = fr.schmidt_of_normal_form
        assert sd.coefficients[0] == pytest.approx(1.0 / k, abs=1e-7)
        top = sd.left_ops[0].mat
        overlap = np.trace(top @ np.eye(k) / np.sqrt(k)).real
        assert np.linalg.norm(top - overlap * np.eye(k) / np.sqrt(k)) <= 1e-7
        assert np.all(sd.coefficients <= 1.0 / k + 1e-9)
        # reconstruction through the filters
        big = np.kron(fr.filter_a.mat, fr.filter_b.mat)
        assert np.linalg.norm(big @ op.mat @ big.conj().T - fr.normal_form.mat) <= 1e-9


@pytest.mark.parametrize("k", [2, 3])
def test_conjugate_mode_random_invariant(k):
    for seed in range(15):
        op = _scaled_invariant(k, seed)
        assert classify(op).invariant
        fr = sinkhorn_filter(op, "conjugate")
        assert fr.converged
        assert fr.marginal_residual_a <= 1e-9 and fr.marginal_residual_b <= 1e-9
        assert fr.class_residual <= 1e-8
        assert np.array_equal(fr.filter_b.mat, fr.filter_a.mat.conj())
        sd = fr.schmidt_of_normal_form
        assert sd.coefficients[0] == pytest.approx(1.0 / k, abs=1e-7)
        top = sd.left_ops[0].mat
        overlap = np.trace(top @ np.eye(k) / np.sqrt(k)).real
        assert np.linalg.norm(top - overlap * np.eye(k) / np.sqrt(k)) <= 1e-7


def test_general_mode_random_density():
    for seed in range(10):
        g = random_density(3, 9, seed)
        fr = sinkhorn_filter(g, "general")
        assert fr.converged
        assert fr.marginal_residual_a <= 1e-9 and fr.marginal_residual_b <= 1e-9
        assert doubly_stochastic_check(fr.normal_form).doubly_stochastic


def test_monitor_is_nonincreasing():
    for k in (2, 3):
        for seed in range(10):
            fr = sinkhorn_filter(_scaled_spc(k, seed), "symmetric")
            monitors = [entry["monitor"] for entry in fr.iteration_log]
            assert all(
                monitors[i + 1] <= monitors[i] + 1e-12 for i in range(len(monitors) - 1)
            )
            fr = sinkhorn_filter(random_density(k, k * k, seed), "general")
            assert all(abs(e["monitor"]) <= 1e-12 for e in fr.iteration_log)


def test_unconverged_run_returns_flagged_result():
    op = _scaled_spc(3, 0)
    fr = sinkhorn_filter(op, "symmetric", max_iter=2)
    assert not fr.converged
    assert fr.iterations == 2
    assert len(fr.iteration_log) == 2


def test_mode_gates(bell2, classical_diag2, identity_plus_u2):
    with pytest.raises(WrongClassForMode):
        sinkhorn_filter(bell2, "symmetric")
    with pytest.raises(WrongClassForMode):
        sinkhorn_filter(canonical("werner", 2, alpha=0.5), "conjugate")
    with pytest.raises(NotPSD):
        sinkhorn_filter(BipartiteOperator(np.diag([1.0, -0.5, 1, 1]), 2, 2), "general")
    with pytest.raises(DimensionMismatch):
        sinkhorn_filter(BipartiteOperator(np.eye(6) / 6, 2, 3), "general")


def test_marginal_rank_gate():
    e11 = np.zeros((2, 2))
    e11[0, 0] = 1.0
    deficient = kron(LocalOperator(e11), LocalOperator(np.eye(2) / 2))
    with pytest.raises(MarginalRankDeficient):
        sinkhorn_filter(deficient, "general")


def test_left_mode_structure():
    for k in (2, 3):
        for seed in range(10):
            g = random_density(k, k * k, seed)
            fr = sinkhorn_filter(g, "left")
            assert fr.converged
            assert fr.filter_b is None
            sd = fr.schmidt_of_normal_form
            assert np.linalg.norm(sd.left_ops[0].mat - np.eye(k) / np.sqrt(k)) <= 1e-7
            assert sd.coefficients[0] >= np.max(sd.coefficients) - 1e-12
            n = len(sd.coefficients)
            for i in range(n):
                for j in range(n):
                    gij = np.trace(sd.left_ops[i].mat @ sd.left_ops[j].mat).real
                    dij = np.trace(sd.right_ops[i].mat @ sd.right_ops[j].mat).real
                    assert abs(gij - (i == j)) <= 1e-8
                    assert abs(dij - (i == j)) <= 1e-8
            rebuilt = sum(
                c * np.kron(a.mat, b.mat)
                for c, a, b in zip(sd.coefficients, sd.left_ops, sd.right_ops)
            )
            assert np.linalg.norm(rebuilt - fr.normal_form.mat) <= 1e-8
            # one-sided reconstruction and coefficient-norm link
            big = np.kron(fr.filter_a.mat, np.eye(k))
            gn = g.mat / np.trace(g.mat).real
            assert np.linalg.norm(big @ gn @ big.conj().T - fr.normal_form.mat) <= 1e-9
            s1 = np.linalg.svd(realign(fr.normal_form).mat, compute_uv=False)[0]
            assert sd.coefficients[0] == pytest.approx(s1, abs=1e-8)


def test_doubly_stochastic_check_examples(classical_diag2):
    rep = doubly_stochastic_check(classical_diag2)
    assert rep.doubly_stochastic
    assert rep.forward_residual <= 1e-14 and rep.adjoint_residual <= 1e-14

    lopsided = kron(LocalOperator(np.diag([0.7, 0.3])), LocalOperator(np.eye(2) / 2))
    rep = doubly_stochastic_check(lopsided)
    assert not rep.doubly_stochastic
    assert rep.adjoint_residual > 1e-2  # first-factor marginal is off
    assert rep.forward_residual <= 1e-12

    with pytest.raises(NotHermitian):
        doubly_stochastic_check(BipartiteOperator(np.triu(np.ones((4, 4))), 2, 2))


def test_converged_normal_forms_are_doubly_stochastic():
    for seed in range(5):
        fr = sinkhorn_filter(_scaled_spc(2, seed), "symmetric")
        assert doubly_stochastic_check(fr.normal_form).doubly_stochastic


def test_probe_block_state_witness():
    e11 = np.zeros((2, 2))
    e11[0, 0] = 1.0
    e22 = np.zeros((2, 2))
    e22[1, 1] = 1.0
    g = BipartiteOperator(np.kron(e11, e11) + np.kron(e22, e22), 2, 2)
    res = fully_indecomposable_probe(g, trials=20)
    assert res.verdict == "decomposable_witness"
    x, y = res.witness
    assert abs(np.trace(g_apply(g, x).mat @ y.mat)) <= 1e-12
    ranks = [int(np.sum(np.linalg.eigvalsh(m.mat) > 1e-8)) for m in (x, y)]
    assert sum(ranks) >= 2


def test_probe_identity_plus_u_likely(identity_plus_u2):
    res = fully_indecomposable_probe(identity_plus_u2, trials=50)
    assert res.verdict == "indecomposable_likely"
    assert res.witness is None


def test_probe_bell_rank_preserving_witness(bell2):
    # the contraction map of the maximally entangled state is the transpose
    # (up to scale), which preserves rank; a rank-preserving map on singular
    # inputs admits an orthogonality witness with rank sum k
    res = fully_indecomposable_probe(bell2, trials=50)
    assert res.verdict == "decomposable_witness"
    x, y = res.witness
    assert abs(np.trace(g_apply(bell2, x).mat @ y.mat)) <= 1e-12


def test_probe_rejects_non_psd():
    with pytest.raises(NotPSD):
        fully_indecomposable_probe(BipartiteOperator(np.diag([1.0, -1, 1, 1]), 2, 2))
