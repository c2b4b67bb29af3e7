"""Exact classical values: enumeration oracles and the closed forms."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from loccg.errors import CapacityError, DomainError
from loccg.games import Grouping, ThresholdGame, alpha, majority
from loccg.numerics import binomial
from loccg.reduction import BiasedGame, reduce

ENUMERATION_BUDGET = 30  # max total alphabet size for brute force
_INT64_SAFE = 2**62


@dataclass(frozen=True)
class DeterministicStrategy:
    alice_out: tuple[int, ...]
    bob_out: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "alice_out", tuple(int(v) for v in self.alice_out))
        object.__setattr__(self, "bob_out", tuple(int(v) for v in self.bob_out))
        if any(v not in (1, -1) for v in self.alice_out + self.bob_out):
            raise DomainError("strategy outputs must be +1 or -1")


def strategy_value(bg: BiasedGame, s: DeterministicStrategy) -> Fraction:
    if len(s.alice_out) != bg.mA or len(s.bob_out) != bg.mB:
        raise DomainError(
            f"strategy shape ({len(s.alice_out)}, {len(s.bob_out)}) does not match game ({bg.mA}, {bg.mB})"
        )
    return sum(
        (
            p * q * sign * a * b
            for p, a, row in zip(bg.pA, s.alice_out, bg.signs)
            for q, b, sign in zip(bg.pB, s.bob_out, row)
        ),
        Fraction(0),
    )


def _sign_vectors(m: int) -> np.ndarray:
    """All +-1 vectors of length m, +1 first, in lexicographic order."""
    return np.array(list(itertools.product((1, -1), repeat=m)), dtype=np.int64).reshape(-1, m)


def _greedy(column_sums) -> list[int]:
    # ties (a zero sum) answer +1
    return [1 if v >= 0 else -1 for v in column_sums]


def max_bilinear(P: list[list[int]]) -> tuple[int, list[int], list[int]]:
    """Maximise sum_ij a_i P_ij b_j over +-1 vectors a, b, exactly.

    Enumerates the shorter side and answers greedily on the other. Among
    maximisers the first one in enumeration order is returned.
    """
    rows, cols = len(P), len(P[0])
    if rows + cols > ENUMERATION_BUDGET:
        raise CapacityError(f"alphabet sizes {rows}+{cols} exceed the budget of {ENUMERATION_BUDGET}")
    transpose = rows < cols
    mat = [list(r) for r in zip(*P)] if transpose else [list(r) for r in P]
    # mat is (long side) x (short side); enumerate the short side
    short = len(mat[0])
    bound = sum(abs(v) for r in mat for v in r)
    cands = _sign_vectors(short)
    if bound < _INT64_SAFE:
        arr = np.array(mat, dtype=np.int64)
        vals = np.abs(cands @ arr.T).sum(axis=1)
        best_idx = int(np.argmax(vals))
        best = int(vals[best_idx])
    else:
        best, best_idx = None, 0
        for idx, c in enumerate(cands.tolist()):
            v = sum(abs(sum(x * y for x, y in zip(r, c))) for r in mat)
            if best is None or v > best:
                best, best_idx = v, idx
    short_vec = [int(v) for v in cands[best_idx]]
    long_vec = _greedy([sum(x * y for x, y in zip(r, short_vec)) for r in mat])
    if transpose:
        return best, short_vec, long_vec
    return best, long_vec, short_vec


def brute_force_value(bg: BiasedGame) -> tuple[Fraction, DeterministicStrategy]:
    P, denom = bg.integer_payoff()
    best, a, b = max_bilinear(P)
    return Fraction(best, denom), DeterministicStrategy(a, b)


def weight_payoff(game: ThresholdGame, grouping: Grouping) -> list[list[int]]:
    """Integer payoff 2^n * (weight-class probability) * (-1)^f on group weights."""
    n, k = game.n, grouping.k
    return [
        [binomial(n - k, a) * binomial(k, b) * (1 if a + b < game.t else -1) for b in range(k + 1)]
        for a in range(n - k + 1)
    ]


def grouped_weight_value(game: ThresholdGame, grouping: Grouping) -> Fraction:
    """Classical optimum of the grouped game computed on weight classes, without reducing."""
    grouping.check(game)
    if game.n > 30:
        raise CapacityError(f"n={game.n} exceeds the weight-class enumeration budget")
    best, _, _ = max_bilinear(weight_payoff(game, grouping))
    return Fraction(best, 2**game.n)


def full_string_value(game: ThresholdGame, grouping: Grouping, budget: int = 16) -> Fraction:
    """Classical optimum over arbitrary group answers on full bit strings.

    Each group's parity may be any function of its whole input string. Only
    feasible for tiny groups: the smaller group must have at most ``budget``
    strings.
    """
    grouping.check(game)
    n, k = game.n, grouping.k
    if 2**k > budget:
        raise CapacityError(f"2^{k} strings for the smaller group exceed budget {budget}")
    xs = list(itertools.product((0, 1), repeat=n - k))
    ys = list(itertools.product((0, 1), repeat=k))
    P = np.array([[1 if sum(x) + sum(y) < game.t else -1 for y in ys] for x in xs], dtype=np.int64)
    best = 0
    # enumerate Bob's functions in chunks to bound memory
    bob = _sign_vectors(len(ys))
    for start in range(0, len(bob), 4096):
        chunk = bob[start : start + 4096]
        best = max(best, int(np.abs(chunk @ P.T).sum(axis=1).max()))
    return Fraction(best, 2**n)


def vc_threshold_k1(game: ThresholdGame) -> Fraction:
    """Optimal classical value for the (n-1, 1) grouping: 1 - alpha/2^(n-1)."""
    return 1 - alpha(game) / 2 ** (game.n - 1)


def vc_and(n: int, k: int) -> Fraction:
    if not 2 <= k <= n // 2:
        raise DomainError(f"need 2 <= k <= n/2, got n={n}, k={k}")
    return 1 - Fraction(1, 2 ** (n - 1))


def _majority_params(n: int, k: int) -> int:
    if not 2 <= k <= n // 2:
        raise DomainError(f"need 2 <= k <= n/2, got n={n}, k={k}")
    return majority(n).weight_threshold


def gamma_majority(n: int, k: int) -> int:
    """Loss count of the flip-at-a-fixed-weight MAJORITY strategy (``protocol2_strategy``).

    Its value is 1 - gamma/2^(n-1). This equals the classical optimum for
    k = 2 and for odd k once n is large enough, but not in general.
    """
    t = _majority_params(n, k)
    mu = [binomial(n - k, i) for i in range(n - k + 1)]
    w = [binomial(k, j) for j in range(k + 1)]

    def m(i):
        return mu[t - i] if 0 <= t - i <= n - k else 0

    if k % 2 == 0:
        return sum(m(i) * w[j] for i in range(1, k) for j in range(i)) + m(k)
    h = (k - 1) // 2
    return sum(m(i) * w[j] for i in range(1, h + 1) for j in range(i)) + sum(
        m(i) * w[j] for i in range(h + 1, k + 1) for j in range(i, k + 1)
    )


def vc_majority_formula(n: int, k: int) -> Fraction:
    return 1 - Fraction(gamma_majority(n, k), 2 ** (n - 1))


def protocol2_strategy(game: ThresholdGame, grouping: Grouping) -> DeterministicStrategy:
    """Bob always answers +1; Alice answers -1 once her weight passes a cut-off.

    The cut-off is t - k for even k and t - (k+1)/2 for odd k. Expressed on
    the reduced alphabet, where input 0 already absorbs the sign flip of the
    weights that force the function to 1.
    """
    n, k = game.n, grouping.k
    _majority_params(n, k)
    bg, trace = reduce(game, grouping)
    t = game.weight_threshold
    cut = t - k if k % 2 == 0 else t - (k + 1) // 2
    alice = [1]
    for weights in trace.alice_weights[1:]:
        (a,) = weights
        alice.append(1 if a <= cut else -1)
    return DeterministicStrategy(alice, [1] * bg.mB)


def vc_half_half(n: int) -> Fraction:
    """Closed form quoted for MAJORITY with the (n/2, n/2) grouping.

    1/2 + C(n/2 - 1, n/4)^2 / 2^(n-1) when n/2 is even, 1/2 when odd. It is
    attained by a simple strategy but undershoots the optimum for n >= 6.
    """
    if n < 2 or n % 2:
        raise DomainError(f"need an even n >= 2, got {n}")
    k = n // 2
    if k % 2:
        return Fraction(1, 2)
    return Fraction(1, 2) + Fraction(binomial(k - 1, n // 4) ** 2, 2 ** (n - 1))


def closed_form_value(game: ThresholdGame, grouping: Grouping) -> Fraction:
    """Pick the applicable closed form, or raise DomainError when none applies."""
    grouping.check(game)
    if grouping.k == 1:
        return vc_threshold_k1(game)
    if game.is_and:
        return vc_and(game.n, grouping.k)
    if game.is_majority:
        return vc_majority_formula(game.n, grouping.k)
    raise DomainError(f"no closed-form classical value for {game} with k={grouping.k}")


def is_dyadic(q: Fraction, n: int) -> bool:
    return (2**n) % q.denominator == 0
