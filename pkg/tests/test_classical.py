import itertools
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loccg.classical import (
    DeterministicStrategy,
    brute_force_value,
    closed_form_value,
    gamma_majority,
    grouped_weight_value,
    is_dyadic,
    max_bilinear,
    protocol2_strategy,
    strategy_value,
    vc_and,
    vc_half_half,
    vc_majority_formula,
    vc_threshold_k1,
)
from loccg.errors import CapacityError, DomainError
from loccg.games import Grouping, ThresholdGame, and_game, majority
from loccg.reduction import BiasedGame, biased_chsh, reduce

N15 = ThresholdGame.from_threshold(15, 8)


def naive_max(P):
    rows, cols = len(P), len(P[0])
    return max(
        sum(a[i] * P[i][j] * b[j] for i in range(rows) for j in range(cols))
        for a in itertools.product((1, -1), repeat=rows)
        for b in itertools.product((1, -1), repeat=cols)
    )


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_max_bilinear_matches_naive(rows, cols, data):
    P = [[data.draw(st.integers(-20, 20)) for _ in range(cols)] for _ in range(rows)]
    best, a, b = max_bilinear(P)
    assert best == naive_max(P)
    assert sum(a[i] * P[i][j] * b[j] for i in range(rows) for j in range(cols)) == best


def test_max_bilinear_big_integers():
    huge = 2**70
    P = [[huge, -huge], [3, huge]]
    assert max_bilinear(P)[0] == naive_max(P)


def test_enumeration_budget():
    with pytest.raises(CapacityError):
        max_bilinear([[1] * 16] * 16)


def test_chsh_and_trivial_games():
    assert brute_force_value(biased_chsh(F(1, 2), F(1, 2)))[0] == F(1, 2)
    allplus = BiasedGame([F(1, 3), F(2, 3)], [F(1)], [[1], [1]])
    assert brute_force_value(allplus)[0] == 1


def test_strategy_value_properties():
    bg, _ = reduce(majority(8), Grouping(2))
    s = DeterministicStrategy([1, -1, 1], [1, 1, -1])
    flipped = DeterministicStrategy([-v for v in s.alice_out], s.bob_out)
    assert strategy_value(bg, flipped) == -strategy_value(bg, s)
    with pytest.raises(DomainError):
        strategy_value(bg, DeterministicStrategy([1], [1]))
    with pytest.raises(DomainError):
        DeterministicStrategy([0], [1])


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 12), st.data())
def test_strategy_value_bounded(n, data):
    k = data.draw(st.integers(1, n // 2))
    t = data.draw(st.integers(max(math.ceil(n / 2), k), n))
    bg, _ = reduce(ThresholdGame.from_threshold(n, t), Grouping(k))
    a = data.draw(st.lists(st.sampled_from([1, -1]), min_size=bg.mA, max_size=bg.mA))
    b = data.draw(st.lists(st.sampled_from([1, -1]), min_size=bg.mB, max_size=bg.mB))
    v = strategy_value(bg, DeterministicStrategy(a, b))
    assert -1 <= v <= brute_force_value(bg)[0] <= 1
    assert is_dyadic(v, n)
    # value 1 only when the strategy reproduces every sign
    perfect = all(bg.signs[i][j] == a[i] * b[j] for i in range(bg.mA) for j in range(bg.mB))
    assert (v == 1) == perfect


def test_k1_closed_form_and_all_plus_strategy():
    for n in range(2, 13):
        for t in range(math.ceil(n / 2), n + 1):
            g = ThresholdGame.from_threshold(n, t)
            bg, _ = reduce(g, Grouping(1))
            allplus = DeterministicStrategy([1, 1], [1, 1])
            assert strategy_value(bg, allplus) == vc_threshold_k1(g) == brute_force_value(bg)[0]


@pytest.mark.parametrize("n,t,expected", [(2, 2, F(1, 2)), (3, 2, F(1, 2)), (10, 10, 1 - F(1, 512))])
def test_vc_threshold_k1_examples(n, t, expected):
    assert vc_threshold_k1(ThresholdGame.from_threshold(n, t)) == expected


@pytest.mark.parametrize("n,k,expected", [(4, 2, F(7, 8)), (6, 3, F(31, 32)), (12, 2, F(2047, 2048))])
def test_vc_and_examples(n, k, expected):
    assert vc_and(n, k) == expected
    assert grouped_weight_value(and_game(n), Grouping(k)) == expected


def test_vc_and_matches_brute_force():
    for n in range(4, 15):
        for k in range(2, n // 2 + 1):
            bg, _ = reduce(and_game(n), Grouping(k))
            assert brute_force_value(bg)[0] == vc_and(n, k)


def test_grouped_weight_examples():
    assert grouped_weight_value(and_game(2), Grouping(1)) == F(1, 2)
    assert grouped_weight_value(and_game(4), Grouping(2)) == F(7, 8)


@pytest.mark.parametrize("n,k,gamma,value", [(4, 2, 3, F(5, 8)), (6, 2, 10, F(11, 16)), (15, 5, 6792, F(19184, 2**15))])
def test_gamma_examples(n, k, gamma, value):
    assert gamma_majority(n, k) == gamma
    assert vc_majority_formula(n, k) == value


def test_protocol2_realises_the_formula():
    for n in range(4, 16):
        for k in range(2, n // 2 + 1):
            g = majority(n)
            bg, _ = reduce(g, Grouping(k))
            assert strategy_value(bg, protocol2_strategy(g, Grouping(k))) == vc_majority_formula(n, k)


def test_protocol2_small_cases():
    g = majority(4)
    s = protocol2_strategy(g, Grouping(2))
    assert s.bob_out == (1, 1, 1)
    assert s.alice_out == (1, 1, -1)  # +1 on weight 0, -1 on weights 1 and 2
    s15 = protocol2_strategy(N15, Grouping(5))
    # flip between Alice weights 5 and 6
    assert s15.alice_out == (1, 1, 1, 1, -1, -1)


def test_two_player_bob_formula_is_optimal():
    for n in range(4, 17):
        bg, _ = reduce(majority(n), Grouping(2))
        assert brute_force_value(bg)[0] == vc_majority_formula(n, 2), n


def test_formula_is_only_a_lower_bound_for_larger_groups():
    # the fixed-cut strategy is beaten for k >= 3 on small n
    for n, k, opt in [(6, 3, F(5, 8)), (8, 4, F(77, 128)), (14, 5, F(1239, 2048))]:
        bg, _ = reduce(majority(n), Grouping(k))
        assert brute_force_value(bg)[0] == opt
        assert vc_majority_formula(n, k) < opt
    for n in range(4, 15):
        for k in range(2, n // 2 + 1):
            bg, _ = reduce(majority(n), Grouping(k))
            assert vc_majority_formula(n, k) <= brute_force_value(bg)[0]


def test_fifteen_player_optimum_on_full_strings():
    bg, _ = reduce(N15, Grouping(5))
    best, strat = brute_force_value(bg)
    assert best == F(19464, 2**15)
    assert grouped_weight_value(N15, Grouping(5)) == best
    # evaluate the optimal group answers on every one of the 2^15 input strings
    alice_by_weight = [1, 1, 1, 1, 1, 1, -1, -1, -1, -1, -1]
    bob_by_weight = [1, 1, 1, 1, 1, -1]
    total = 0
    for bits in itertools.product((0, 1), repeat=15):
        wa, wb = sum(bits[:10]), sum(bits[10:])
        f = 1 if wa + wb >= 8 else 0
        total += (-1) ** f * alice_by_weight[wa] * bob_by_weight[wb]
    assert F(total, 2**15) == best


@pytest.mark.parametrize("n,expected", [(4, F(5, 8)), (6, F(1, 2)), (8, F(1, 2) + F(9, 128))])
def test_vc_half_half_examples(n, expected):
    assert vc_half_half(n) == expected


def test_vc_half_half_is_below_the_optimum():
    truth = {4: F(5, 8), 6: F(5, 8), 8: F(77, 128), 10: F(157, 256), 12: F(589, 1024)}
    for n, opt in truth.items():
        bg, _ = reduce(majority(n), Grouping(n // 2))
        assert brute_force_value(bg)[0] == opt
        assert vc_half_half(n) <= opt


def test_closed_form_dispatch():
    assert closed_form_value(majority(6), Grouping(1)) == vc_threshold_k1(majority(6))
    assert closed_form_value(and_game(6), Grouping(3)) == F(31, 32)
    assert closed_form_value(majority(6), Grouping(2)) == F(11, 16)
    with pytest.raises(DomainError):
        closed_form_value(ThresholdGame.from_threshold(8, 5), Grouping(3))


def test_classical_values_are_dyadic():
    for n in range(2, 11):
        for k in range(1, n // 2 + 1):
            for t in range(max(math.ceil(n / 2), k), n + 1):
                g = ThresholdGame.from_threshold(n, t)
                assert is_dyadic(grouped_weight_value(g, Grouping(k)), n)
