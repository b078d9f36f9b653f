import itertools

import numpy as np
import pytest

from kextdistill.analytic import alpha_max_k1, maxmixed_bound
from kextdistill.linalg import (
    HermitianOperator,
    LinearMapHandle,
    eig_min_dense,
    embed,
    layout,
    partial_trace,
    permute_subsystems,
)
from kextdistill.solver import (
    CJOperator,
    KExtProblem,
    SingularOutputError,
    build_probe,
    cj_of_mnp,
    construct_f1_strategy,
    evaluate_map_fidelity,
    fidelity_threshold,
    lambda_min_alpha,
    symmetrize,
)
from kextdistill.states import (
    WernerParams,
    bell_state,
    from_matrix,
    maximally_mixed,
    probe_operator,
    projectors,
    werner,
)


def random_state(rng, d_a, d_b):
    dim = d_a * d_b
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return from_matrix(g @ g.conj().T, layout(("A", d_a), ("B", d_b)))


def identity_channel_cj(d=2):
    lay = layout(("A", d), ("B", d), ("a", d), ("b", d))
    phi = bell_state("phi_plus", d).matrix
    mat = embed(lay, {("A", "a"): phi, ("B", "b"): phi}).entries
    return CJOperator(from_matrix(mat, lay, normalized=False).op)


def discard_and_prepare_cj(d_a=2, d_b=2):
    lay = layout(("A", d_a), ("B", d_b), ("a", 2), ("b", 2))
    phi = bell_state("phi_plus", 2).matrix
    mat = embed(lay, {"A": np.eye(d_a) / d_a, "B": np.eye(d_b) / d_b, ("a", "b"): phi}).entries
    return CJOperator(from_matrix(mat, lay, normalized=False).op)


# ---------------------------------------------------------------------------
# problem construction


def test_problem_dimension_formula():
    for d, n, k in itertools.product((2, 3), (1, 2), (1, 2)):
        prob = KExtProblem.for_werner(d=d, gamma=0.1, n=n, k=k)
        assert prob.total_dim == d ** (n * (k + 2)) * 2 ** (k + 2)


def test_problem_validation():
    state = maximally_mixed(2, 2)
    with pytest.raises(ValueError):
        KExtProblem(state=state, n=0)
    with pytest.raises(ValueError):
        KExtProblem(state=state, side="carol")
    with pytest.raises(ValueError):
        KExtProblem(state=state, bell="phi_minus")
    with pytest.raises(ValueError):
        KExtProblem.for_werner(d=3, gamma=0.0, n=2, k=2, backend="dense")  # 104976 dims


def test_backend_resolution():
    assert KExtProblem.for_werner(d=2, gamma=0.0).resolved_backend() == "dense"
    assert KExtProblem.for_werner(d=3, gamma=0.0, n=2).resolved_backend() == "iterative"


# ---------------------------------------------------------------------------
# probe assembly


def test_probe_of_maximally_mixed_factorizes():
    prob = KExtProblem(state=maximally_mixed(2, 2), n=1, k=1)
    probe = build_probe(prob, 0.6)
    m = probe_operator(0.6).entries
    lay = probe.layout
    expected = (
        embed(lay, {("a", "b0"): m}).entries + embed(lay, {("a", "b1"): m}).entries
    ) / 4.0
    assert np.abs(probe.entries - expected).max() < 1e-13


def test_probe_is_psd_at_alpha_one():
    rng = np.random.default_rng(0)
    states = [
        maximally_mixed(2, 2),
        werner(WernerParams(d=2, gamma=-0.7)),
        random_state(rng, 2, 2),
    ]
    for state in states:
        prob = KExtProblem(state=state, n=1, k=1)
        probe = build_probe(prob, 1.0)
        assert eig_min_dense(probe) > -1e-11


def test_probe_negative_below_threshold_for_singlet():
    prob = KExtProblem.for_werner(d=2, gamma=-1.0)
    probe = build_probe(prob, 0.9)
    assert eig_min_dense(probe) < -1e-6


def test_probe_real_fast_path():
    probe = build_probe(KExtProblem.for_werner(d=2, gamma=0.5), 0.5)
    assert probe.is_real


def test_dense_and_handle_agree():
    rng = np.random.default_rng(1)
    state = random_state(rng, 2, 2)
    prob_dense = KExtProblem(state=state, n=1, k=1, backend="dense")
    prob_iter = KExtProblem(state=state, n=1, k=1, backend="iterative")
    probe = build_probe(prob_dense, 0.7)
    handle = build_probe(prob_iter, 0.7)
    assert isinstance(handle, LinearMapHandle)
    v = rng.standard_normal(probe.dim) + 1j * rng.standard_normal(probe.dim)
    assert np.abs(probe.entries @ v - handle.apply(v)).max() < 1e-10


def test_alice_side_probe_matches_swapped_state():
    rng = np.random.default_rng(2)
    state = random_state(rng, 2, 2)
    swapped = from_matrix(
        permute_subsystems(state.op, {"A": "B", "B": "A"}).entries, state.layout
    )
    a_side = lambda_min_alpha(KExtProblem(state=state, side="alice"), 0.7)
    b_side = lambda_min_alpha(KExtProblem(state=swapped, side="bob"), 0.7)
    assert abs(a_side - b_side) < 1e-10


# ---------------------------------------------------------------------------
# lambda_min and thresholds


def test_lambda_min_matches_triple_for_maximally_mixed():
    prob = KExtProblem(state=maximally_mixed(2, 2), n=1, k=1)
    assert lambda_min_alpha(prob, 0.6) == pytest.approx(-0.3 / 4.0, abs=1e-12)
    assert lambda_min_alpha(prob, 0.75) == pytest.approx(0.0, abs=1e-10)


def test_lambda_min_positive_above_werner_threshold():
    prob = KExtProblem.for_werner(d=3, gamma=0.5)
    assert lambda_min_alpha(prob, 0.82) > 0.0


def test_threshold_maximally_mixed():
    for k, expected in ((1, 0.75), (2, 2.0 / 3.0), (3, 0.625)):
        prob = KExtProblem(state=maximally_mixed(2, 2), k=k)
        result = fidelity_threshold(prob)
        assert abs(result.alpha_star - expected) < 1e-6
        assert result.full_rank


def test_threshold_werner_both_signs():
    for gamma in (0.5, -0.5):
        result = fidelity_threshold(KExtProblem.for_werner(d=3, gamma=gamma))
        assert abs(result.alpha_star - 0.8162277660168379) < 1e-6


def test_threshold_result_invariants():
    result = fidelity_threshold(KExtProblem.for_werner(d=2, gamma=-0.3))
    alphas = [a for a, _ in result.samples]
    lams = [v for _, v in result.samples]
    assert alphas == sorted(alphas)
    assert all(b >= a - 1e-12 for a, b in zip(lams, lams[1:]))
    assert result.lambda_residual < 0.0
    assert result.certificate is not None
    assert result.certificate.shape == (64,)


def test_threshold_tolerance_validation():
    with pytest.raises(ValueError):
        fidelity_threshold(KExtProblem.for_werner(d=2, gamma=0.0), tol_alpha=1e-12)


def test_lambda_monotone_in_alpha():
    rng = np.random.default_rng(3)
    for prob in (
        KExtProblem.for_werner(d=2, gamma=0.4),
        KExtProblem(state=random_state(rng, 2, 2), k=1),
    ):
        lams = [lambda_min_alpha(prob, a) for a in np.linspace(0.0, 1.0, 11)]
        assert all(b >= a - 1e-12 for a, b in zip(lams, lams[1:]))


def test_threshold_nonincreasing_in_k():
    values = [
        fidelity_threshold(KExtProblem.for_werner(d=2, gamma=-0.5, k=k), tol_alpha=1e-7).alpha_star
        for k in (1, 2, 3)
    ]
    assert all(a >= b - 1e-6 for a, b in zip(values, values[1:]))


def test_universal_floor_over_states():
    rng = np.random.default_rng(5)
    states = [
        werner(WernerParams(d=2, gamma=0.1)),
        random_state(rng, 2, 2),
    ]
    for state in states:
        for k in (1, 2):
            result = fidelity_threshold(KExtProblem(state=state, k=k), tol_alpha=1e-7)
            assert result.alpha_star >= maxmixed_bound(k) - 1e-6


def test_bell_choice_equivalence():
    r_phi = fidelity_threshold(KExtProblem.for_werner(d=2, gamma=-0.5, bell="phi_plus"))
    r_psi = fidelity_threshold(KExtProblem.for_werner(d=2, gamma=-0.5, bell="psi_minus"))
    assert abs(r_phi.alpha_star - r_psi.alpha_star) < 1e-8


def test_threshold_dimension_independence():
    for gamma in (-0.5, 0.3):
        r2 = fidelity_threshold(KExtProblem.for_werner(d=2, gamma=gamma))
        r3 = fidelity_threshold(KExtProblem.for_werner(d=3, gamma=gamma))
        assert abs(r2.alpha_star - r3.alpha_star) < 1e-6


def test_many_copy_thresholds_increase():
    for gamma in (-0.25, 0.25):
        values = [
            fidelity_threshold(
                KExtProblem.for_werner(d=2, gamma=gamma, n=n, k=1)
            ).alpha_star
            for n in (1, 2, 3)
        ]
        assert values[0] < values[1] < values[2]


def test_embedding_instability():
    embedded = from_matrix(
        np.kron(np.eye(2) / 2.0, np.diag([0.5, 0.5, 0.0])), layout(("A", 2), ("B", 3))
    )
    result = fidelity_threshold(KExtProblem(state=embedded, k=1))
    assert result.alpha_star >= 0.99
    assert not result.full_rank
    square = fidelity_threshold(KExtProblem(state=maximally_mixed(2, 2), k=1))
    assert abs(square.alpha_star - 0.75) < 1e-6


# ---------------------------------------------------------------------------
# symmetrizer properties


def test_symmetrizer_preserves_psd():
    rng = np.random.default_rng(6)
    lay = layout(("B0", 2), ("b0", 2), ("B1", 2), ("b1", 2))
    for _ in range(5):
        g = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        h = HermitianOperator(lay, g @ g.conj().T)
        assert eig_min_dense(symmetrize(h, [("B0", "b0"), ("B1", "b1")])) > -1e-10


def test_symmetrizer_is_self_adjoint():
    rng = np.random.default_rng(7)
    lay = layout(("B0", 2), ("b0", 2), ("B1", 2), ("b1", 2))
    groups = [("B0", "b0"), ("B1", "b1")]
    for _ in range(5):
        ga = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        gb = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        a = HermitianOperator(lay, ga + ga.conj().T)
        b = HermitianOperator(lay, gb + gb.conj().T)
        lhs = np.trace(symmetrize(a, groups).entries @ b.entries)
        rhs = np.trace(a.entries @ symmetrize(b, groups).entries)
        assert abs(lhs - rhs) / max(1.0, abs(lhs)) < 1e-10


# ---------------------------------------------------------------------------
# CJ evaluation


def test_discard_and_prepare_reaches_unit_fidelity():
    rng = np.random.default_rng(8)
    cj = discard_and_prepare_cj()
    for state in (maximally_mixed(2, 2), random_state(rng, 2, 2)):
        assert evaluate_map_fidelity(cj, state) == pytest.approx(1.0, abs=1e-12)


def test_identity_channel_on_bell_state():
    cj = identity_channel_cj(2)
    phi = bell_state("phi_plus", 2, labels=("A", "B"))
    assert evaluate_map_fidelity(cj, phi) == pytest.approx(1.0, abs=1e-12)


def test_identity_channel_matches_direct_overlap():
    cj = identity_channel_cj(2)
    for gamma in (-0.8, 0.0, 0.3):
        state = werner(WernerParams(d=2, gamma=gamma))
        direct = float(np.trace(state.matrix @ bell_state("phi_plus", 2).matrix).real)
        assert abs(evaluate_map_fidelity(cj, state) - direct) < 1e-12


def test_singular_output_is_reported():
    lay = layout(("A", 2), ("B", 2), ("a", 2), ("b", 2))
    phi = bell_state("phi_plus", 2).matrix
    proj = np.diag([0.0, 1.0])
    mat = embed(lay, {"A": proj, "B": proj, ("a", "b"): phi}).entries
    cj = CJOperator(from_matrix(mat, lay, normalized=False).op)
    zero_overlap = from_matrix(np.kron(np.diag([1.0, 0.0]), np.diag([1.0, 0.0])), layout(("A", 2), ("B", 2)))
    with pytest.raises(SingularOutputError):
        evaluate_map_fidelity(cj, zero_overlap)


def test_cj_of_mnp_product_measurement_action():
    rng = np.random.default_rng(9)

    def local(d):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        m = g @ g.conj().T
        return m / np.trace(m).real

    sig_a, sig_b, sig_e = local(2), local(2), local(2)
    sigma_in = from_matrix(
        np.kron(sig_a, np.kron(sig_b, sig_e)), layout(("S", 2), ("X0", 2), ("X1", 2))
    )
    lay_out = layout(("s", 2), ("x0", 2), ("x1", 2))
    phi = bell_state("phi_plus", 2).matrix
    sigma_out = from_matrix(
        embed(lay_out, {("s", "x0"): phi, "x1": np.eye(2) / 2.0}).entries, lay_out
    )
    cj = cj_of_mnp(sigma_in, sigma_out)
    rho = random_state(rng, 2, 2)
    out = 4.0 * np.einsum("ixjy,ji->xy", cj.matrix.reshape(4, 4, 4, 4), rho.matrix.T)
    w1 = float(np.trace(rho.matrix @ np.kron(sig_a, sig_b)).real)
    w2 = float(np.trace(rho.matrix @ np.kron(sig_a, sig_e)).real)
    direct = w1 * phi + w2 * np.eye(4) / 4.0
    scale = np.trace(out).real / np.trace(direct).real
    assert np.abs(out - scale * direct).max() < 1e-10


def test_cj_of_mnp_discard_and_prepare_special_case():
    # measuring the identity on every slot and preparing the same Bell output
    lay_in = layout(("S", 2), ("X0", 2), ("X1", 2))
    sigma_in = from_matrix(np.eye(8), lay_in)
    lay_out = layout(("s", 2), ("x0", 2), ("x1", 2))
    phi = bell_state("phi_plus", 2).matrix
    sigma_out = from_matrix(
        embed(lay_out, {("s", "x0"): phi, "x1": np.eye(2) / 2.0}).entries, lay_out
    )
    cj = cj_of_mnp(sigma_in, sigma_out)
    rng = np.random.default_rng(10)
    state = random_state(rng, 2, 2)
    fid = evaluate_map_fidelity(cj, state)
    # outcome 0 prepares the Bell state, outcome 1 the maximally mixed one,
    # both with equal weight on any state
    assert fid == pytest.approx(0.5 * 1.0 + 0.5 * 0.25, abs=1e-10)


def test_cj_of_mnp_two_evaluation_paths_agree():
    rng = np.random.default_rng(11)
    rho = random_state(rng, 2, 2)

    def local(d):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        m = g @ g.conj().T
        return m / np.trace(m).real

    sig_a, sig_b, sig_e = local(2), local(2), local(2)
    sigma_in = from_matrix(
        np.kron(sig_a, np.kron(sig_b, sig_e)), layout(("S", 2), ("X0", 2), ("X1", 2))
    )
    phi = bell_state("phi_plus", 2).matrix
    lay_out = layout(("s", 2), ("x0", 2), ("x1", 2))
    sigma_out = from_matrix(
        embed(lay_out, {("s", "x0"): phi, "x1": np.eye(2) / 2.0}).entries, lay_out
    )
    cj = cj_of_mnp(sigma_in, sigma_out)
    via_cj = evaluate_map_fidelity(cj, rho)
    w1 = float(np.trace(rho.matrix @ np.kron(sig_a, sig_b)).real)
    w2 = float(np.trace(rho.matrix @ np.kron(sig_a, sig_e)).real)
    direct = (w1 * 1.0 + w2 * 0.25) / (w1 + w2)
    assert abs(via_cj - direct) < 1e-10


def test_cj_is_k_extendible_by_construction():
    # the pre-trace symmetrized operator is invariant under slot swaps, so
    # tracing different slots yields the same reduction
    rng = np.random.default_rng(12)
    state = random_state(rng, 2, 2)
    kernel_vec = np.linalg.eigh(state.matrix)[1][:, 0]
    lay_in = layout(("S", 2), ("X0", 2), ("X1", 2))
    sigma_in = from_matrix(
        embed(lay_in, {("S", "X1"): np.outer(kernel_vec, kernel_vec.conj()), "X0": np.eye(2) / 2}).entries,
        lay_in,
    )
    phi = bell_state("phi_plus", 2).matrix
    lay_out = layout(("s", 2), ("x0", 2), ("x1", 2))
    sigma_out = from_matrix(
        embed(lay_out, {("s", "x0"): phi, "x1": np.eye(2) / 2.0}).entries, lay_out
    )
    cj = cj_of_mnp(sigma_in, sigma_out)
    assert eig_min_dense(cj.op) > -1e-10


# ---------------------------------------------------------------------------
# unit-fidelity strategies


def test_f1_strategy_pure_product_state():
    pure = from_matrix(
        np.kron(np.diag([1.0, 0.0]), np.diag([1.0, 0.0])), layout(("A", 2), ("B", 2))
    )
    for k in (1, 2, 3):
        cj, side = construct_f1_strategy(pure, k)
        assert side == "bob"
        assert evaluate_map_fidelity(cj, pure) == pytest.approx(1.0, abs=1e-10)


def test_f1_strategy_antisymmetric_projector():
    _, p_as = projectors(3)
    state = from_matrix(p_as.entries, p_as.layout)
    for k in (1, 2):
        cj, _ = construct_f1_strategy(state, k)
        assert evaluate_map_fidelity(cj, state) == pytest.approx(1.0, abs=1e-10)


def test_f1_strategy_alice_side():
    state = from_matrix(np.kron(np.diag([0.0, 1.0]), np.eye(2) / 2.0), layout(("A", 2), ("B", 2)))
    cj, side = construct_f1_strategy(state, 1)
    assert side == "alice"
    assert evaluate_map_fidelity(cj, state) == pytest.approx(1.0, abs=1e-10)


def test_f1_strategy_symmetric_projector_via_kernel_state():
    p_s, _ = projectors(3)
    state = from_matrix(p_s.entries, p_s.layout)
    cj, side = construct_f1_strategy(state, 1)
    assert side == "bob"
    assert evaluate_map_fidelity(cj, state) == pytest.approx(1.0, abs=1e-10)


def test_f1_strategy_full_rank_returns_none():
    assert construct_f1_strategy(werner(WernerParams(d=3, gamma=0.3)), 1) is None
    assert construct_f1_strategy(maximally_mixed(2, 2), 2) is None


def test_f1_strategy_supplied_extension():
    vec = np.zeros(27)
    for perm in itertools.permutations(range(3)):
        sign = 1 if perm in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1
        vec[perm[0] * 9 + perm[1] * 3 + perm[2]] = sign
    vec /= np.linalg.norm(vec)
    extension = from_matrix(np.outer(vec, vec), layout(("A", 3), ("E1", 3), ("E2", 3)))
    p_s, p_as = projectors(3)
    # the extension's two-party marginals are the antisymmetric state
    marg = partial_trace(extension.op, ("A", "E1")).entries
    assert np.abs(marg - p_as.entries / 3.0).max() < 1e-12
    state = from_matrix(p_s.entries, p_s.layout)
    cj, side = construct_f1_strategy(state, 2, kernel_extension=extension)
    assert side == "bob"
    assert evaluate_map_fidelity(cj, state) == pytest.approx(1.0, abs=1e-10)


def test_symmetric_projector_still_distills_at_k3():
    # d = 3 symmetric projector: the probe stays negative all the way up at
    # three extensions, so the threshold sits at 1 despite the kernel being
    # only 1-extendible
    p_s, _ = projectors(3)
    state = from_matrix(p_s.entries, p_s.layout)
    prob = KExtProblem(state=state, k=3)
    result = fidelity_threshold(prob, tol_alpha=1e-6)
    assert result.alpha_star >= 1.0 - 1e-4
    assert not result.full_rank


def test_cj_serialization_round_trip(tmp_path):
    from kextdistill.states import load_state, save_state

    pure = from_matrix(
        np.kron(np.diag([1.0, 0.0]), np.diag([1.0, 0.0])), layout(("A", 2), ("B", 2))
    )
    cj, _ = construct_f1_strategy(pure, 1)
    path = tmp_path / "strategy.cj"
    save_state(path, cj.op)
    loaded = load_state(path, require_normalized=False)
    assert loaded.layout.labels == ("A", "B", "a", "b")
    assert np.array_equal(loaded.matrix, cj.matrix)


def test_f1_strategy_rejects_bad_extension():
    full = werner(WernerParams(d=3, gamma=-0.2))
    p_s, _ = projectors(3)
    state = from_matrix(p_s.entries, p_s.layout)
    bad = from_matrix(np.eye(27), layout(("A", 3), ("E1", 3), ("E2", 3)))
    with pytest.raises(ValueError):
        construct_f1_strategy(state, 2, kernel_extension=bad)
    assert construct_f1_strategy(full, 2) is None
