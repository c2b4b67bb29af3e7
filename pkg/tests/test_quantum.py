import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loccg.classical import brute_force_value, vc_and, vc_threshold_k1
from loccg.errors import DomainError, ExtractionError
from loccg.games import Grouping, ThresholdGame, alpha, and_game, majority
from loccg.numerics import is_psd
from loccg.quantum import (
    PrimalSolution,
    QuantumProtocol,
    SolverConfig,
    and_biased_game,
    certificate_from_lambda,
    dual_and_closed_form,
    dual_biased_chsh_closed_form,
    dual_from_primal,
    dual_from_protocol,
    dual_majority_conjecture,
    evaluate_protocol,
    extract_observables,
    k1_biased_game,
    majority_conjecture_lambda,
    protocol1,
    quantum_value,
    solve_biased,
    solve_primal,
    vq_squared,
    vq_threshold_formula,
    weight_matrix,
    _tensor_correlation,
)
from loccg.reduction import biased_chsh, reduce

CHSH = biased_chsh(F(1, 2), F(1, 2))
FAST = SolverConfig(restarts=8)


def test_weight_matrix_blocks():
    w = weight_matrix(CHSH)
    assert np.allclose(w[:2, 2:], [[0.25, 0.25], [0.25, -0.25]])
    assert np.array_equal(w, w.T)
    bg, _ = reduce(and_game(3), Grouping(1))
    assert np.allclose(weight_matrix(bg)[:2, 2:], [[3 / 8, 3 / 8], [1 / 8, -1 / 8]])


def test_chsh_primal_and_dual():
    ps = solve_primal(CHSH)
    assert ps.value == pytest.approx(1 / math.sqrt(2), abs=1e-9)
    assert np.allclose(np.linalg.norm(ps.vectors, axis=1), 1, atol=1e-12)
    assert np.allclose(np.diag(ps.gram), 1, atol=1e-12)
    assert is_psd(ps.gram, 1e-10)[0]
    cert = dual_from_primal(CHSH, ps)
    assert cert.certified
    assert np.allclose(cert.lam, 1 / (4 * math.sqrt(2)), atol=1e-9)


def test_chsh_extraction():
    qp = extract_observables(solve_primal(CHSH))
    assert qp.thetaA[0] == 0
    # up to a global reflection, which the extraction fixes
    assert qp.thetaA[1] == pytest.approx(math.pi / 2, abs=1e-7)
    assert sorted(qp.phiB) == pytest.approx([-math.pi / 4, math.pi / 4], abs=1e-7)
    assert evaluate_protocol(CHSH, qp) == pytest.approx(1 / math.sqrt(2), abs=1e-12)


def test_same_seed_same_answer():
    bg, _ = reduce(majority(6), Grouping(2))
    a = solve_primal(bg, SolverConfig(seed=5))
    b = solve_primal(bg, SolverConfig(seed=5))
    assert a.value == b.value and np.array_equal(a.uA, b.uA)


def test_non_optimal_point_is_rejected():
    bg, _ = reduce(majority(6), Grouping(2))
    rng = np.random.default_rng(1)
    u = rng.standard_normal((bg.mA, 5))
    v = rng.standard_normal((bg.mB, 5))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    value = float(np.sum(bg.payoff() * (u @ v.T)))
    assert not dual_from_primal(bg, PrimalSolution(u, v, value)).certified


def test_certificate_shape_checked():
    with pytest.raises(DomainError):
        certificate_from_lambda(CHSH, [0.1, 0.2])


@pytest.mark.parametrize("n,t,expected", [(2, 2, math.sqrt(2) / 2), (3, 3, math.sqrt(10) / 4)])
def test_vq_formula_examples(n, t, expected):
    a = alpha(ThresholdGame.from_threshold(n, t))
    assert vq_threshold_formula(n, a) == pytest.approx(expected, abs=1e-15)
    assert float(vq_squared(n, a)) == pytest.approx(expected**2, abs=1e-15)


def test_protocol1_chsh_observables():
    qp = protocol1(2, 1)
    # D0 = X, D1 = -Z, C0 = (X - Z)/sqrt 2, C1 = (X + Z)/sqrt 2
    assert qp.thetaA == pytest.approx((0, math.pi / 2))
    assert qp.phiB == pytest.approx((math.pi / 4, -math.pi / 4))
    assert evaluate_protocol(CHSH, qp) == pytest.approx(1 / math.sqrt(2), abs=1e-12)


def test_protocol1_identity_up_to_30():
    for n in range(2, 31):
        for a in sorted({1, 2, n - 1, 2 ** (n - 2), 2 ** (n - 1)}):
            qp = protocol1(n, a)
            value = evaluate_protocol(k1_biased_game(n, a), qp)
            assert abs(value - vq_threshold_formula(n, a)) <= 1e-12, (n, a)


def test_protocol1_dual_matches_closed_form():
    for n, t in [(3, 3), (5, 3), (7, 5), (10, 6)]:
        a = alpha(ThresholdGame.from_threshold(n, t))
        closed = dual_biased_chsh_closed_form(n, a)
        kkt = dual_from_protocol(k1_biased_game(n, a), protocol1(n, a))
        assert closed.certified and kkt.certified
        assert np.allclose(closed.lam, kkt.lam, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-math.pi, math.pi), min_size=2, max_size=2))
def test_cosine_and_tensor_backends_agree(angles):
    a, b = angles
    assert abs(math.cos(a - b) - _tensor_correlation(a, b)) <= 1e-12


def test_equal_angles_give_the_all_plus_value():
    bg, _ = reduce(majority(6), Grouping(2))
    qp = QuantumProtocol([0.3] * bg.mA, [0.3] * bg.mB)
    expected = sum(p * q * s for p, row in zip(bg.pA, bg.signs) for q, s in zip(bg.pB, row))
    assert evaluate_protocol(bg, qp) == pytest.approx(float(expected), abs=1e-14)
    with pytest.raises(DomainError):
        evaluate_protocol(bg, QuantumProtocol([0.0], [0.0]))


def test_k1_sdp_matches_formula():
    for n in range(2, 21):
        for t in range(math.ceil(n / 2), n + 1, 3):
            g = ThresholdGame.from_threshold(n, t)
            res = quantum_value(g, Grouping(1), FAST)
            assert res.certificate.certified
            assert abs(res.value - vq_threshold_formula(n, alpha(g))) <= 1e-7


def test_and_has_no_advantage():
    for n in range(4, 15, 2):
        for k in range(2, n // 2 + 1):
            res = quantum_value(and_game(n), Grouping(k), FAST)
            assert res.certificate.certified
            assert abs(res.value - float(vc_and(n, k))) <= 1e-7


def test_and_closed_form_dual():
    cert = dual_and_closed_form(4, 2)
    assert np.allclose(cert.lam, [0.375, 0.0625, 0.375, 0.0625])
    assert cert.dual_value == pytest.approx(0.875)
    assert cert.certified
    assert dual_and_closed_form(12, 3).min_eig_K >= -1e-8
    bg = and_biased_game(4, 2)
    assert solve_biased(bg).certificate.dual_value == pytest.approx(0.875, abs=1e-9)


def test_majority_conjecture_dual():
    lam = majority_conjecture_lambda(4, 2)
    assert lam == [F(1, 8), F(1, 16), F(1, 8), F(0), F(1, 4), F(1, 16)]
    assert sum(lam) == F(5, 8)
    assert not dual_majority_conjecture(4, 2).certified
    assert not dual_majority_conjecture(8, 2).certified
    assert dual_majority_conjecture(10, 2).certified


def test_majority_conjecture_sums_to_the_classical_value():
    for n in range(4, 23):
        bg, _ = reduce(majority(n), Grouping(2))
        assert sum(majority_conjecture_lambda(n, 2)) == brute_force_value(bg)[0]
    # whenever the conjectured dual certifies, it certifies the exact optimum
    for k in range(3, 7):
        for n in range(2 * k, 31):
            cert = dual_majority_conjecture(n, k)
            if cert.certified:
                bg, _ = reduce(majority(n), Grouping(k))
                assert sum(majority_conjecture_lambda(n, k)) == brute_force_value(bg)[0]


def test_weak_duality_and_sandwich():
    for n in range(4, 11):
        for k in range(1, n // 2 + 1):
            for t in range(max(math.ceil(n / 2), k), n + 1, 2):
                g = ThresholdGame.from_threshold(n, t)
                res = quantum_value(g, Grouping(k), FAST)
                vc, _ = brute_force_value(res.game)
                assert float(vc) <= res.value + 1e-9 <= 1 + 1e-9
                if res.certificate.min_eig_K >= -1e-8:
                    assert res.certificate.dual_value >= res.value - 1e-9
                assert res.certificate.upper_bound >= res.value - 1e-9


def test_table3_row_five_players():
    res = quantum_value(majority(5), Grouping(2))
    assert res.value == pytest.approx(0.684, abs=5e-4)
    qp = res.protocol
    assert qp.thetaA[0] == 0
    assert math.cos(qp.thetaA[1]) == pytest.approx(math.sqrt(5) / 3, abs=1e-7)
    assert evaluate_protocol(res.game, qp) == pytest.approx(res.value, abs=1e-8)


def test_extraction_refuses_non_planar_solutions():
    u = np.eye(3)
    ps = PrimalSolution(u[:2], u[2:], 0.0)
    with pytest.raises(ExtractionError):
        extract_observables(ps)


def test_and_ratio_decreases_towards_one():
    ratios = []
    for n in range(2, 41):
        vc = vc_threshold_k1(and_game(n))
        ratios.append(vq_squared(n, 1) / vc**2)  # squared ratio, exact
    assert all(a > b for a, b in zip(ratios, ratios[1:]))
    assert all(r > 1 for r in ratios)
    assert math.sqrt(ratios[-1]) < 1 + 1e-6
