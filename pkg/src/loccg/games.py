"""THRESHOLD-family XOR games and their grouping into two communicating parties."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from loccg.errors import DomainError
from loccg.numerics import binomial, parse_rational


@dataclass(frozen=True)
class ThresholdGame:
    """n players win iff the output parity equals [weight of inputs >= t], t = (r/s) n.

    ``(r, s)`` is stored in lowest terms; the case split for ``alpha`` relies on it.
    """

    n: int
    r: int
    s: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"need at least one player, got n={self.n}")
        if self.r < 1 or self.s < 1 or self.r > self.s:
            raise DomainError(f"need 1 <= r <= s, got r={self.r}, s={self.s}")
        g = math.gcd(self.r, self.s)
        if g != 1:
            object.__setattr__(self, "r", self.r // g)
            object.__setattr__(self, "s", self.s // g)

    @classmethod
    def from_fraction(cls, n: int, ratio) -> ThresholdGame:
        q = parse_rational(ratio)
        return cls(n, q.numerator, q.denominator)

    @classmethod
    def from_threshold(cls, n: int, t) -> ThresholdGame:
        """Build from an absolute threshold (integer or e.g. half-integer)."""
        if n < 1:
            raise DomainError(f"need at least one player, got n={n}")
        return cls.from_fraction(n, parse_rational(t) / n)

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.r, self.s)

    @property
    def t(self) -> Fraction:
        return Fraction(self.r * self.n, self.s)

    @property
    def weight_threshold(self) -> int:
        """Smallest total Hamming weight at which the function outputs 1."""
        return math.ceil(self.t)

    @property
    def in_studied_range(self) -> bool:
        return Fraction(self.n, 2) <= self.t <= self.n

    # Both tests compare integer weight thresholds: for odd n, t = n/2 and
    # t = (n+1)/2 describe the same function.
    @property
    def is_and(self) -> bool:
        return self.weight_threshold == self.n

    @property
    def is_majority(self) -> bool:
        return self.weight_threshold == math.ceil(self.n / 2)

    def __str__(self):
        return f"THRESHOLD(n={self.n}, t={self.t})"


def and_game(n: int) -> ThresholdGame:
    return ThresholdGame(n, 1, 1)


def majority(n: int) -> ThresholdGame:
    return ThresholdGame(n, 1, 2)


@dataclass(frozen=True)
class Grouping:
    """Split of the n players into groups of size n - k (Alice) and k (Bob)."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise DomainError(f"group size k must be positive, got {self.k}")

    def check(self, game: ThresholdGame) -> None:
        if self.k > game.n // 2:
            raise DomainError(f"need 1 <= k <= n/2, got k={self.k} for n={game.n}")


def threshold_output(game: ThresholdGame, wx: int, wy: int = 0) -> int:
    """Value of the threshold function on a pair of group weights: 1 iff wx + wy >= t."""
    total = wx + wy
    if wx < 0 or wy < 0 or total > game.n:
        raise DomainError(f"weights ({wx}, {wy}) out of range for n={game.n}")
    return 0 if total < game.t else 1


def payoff_sign(game: ThresholdGame, wx: int, wy: int = 0) -> int:
    return -1 if threshold_output(game, wx, wy) else 1


def floor_form_output(game: ThresholdGame, weight: int) -> int:
    """The closed floor expression floor(r/s + (weight - r/s)/n), evaluated literally.

    Kept only to compare against ``threshold_output``; the two disagree on
    most games (for AND it reduces to OR).
    """
    q = game.ratio
    return math.floor(q + (weight - q) / game.n)


def floor_form_disagreements(game: ThresholdGame) -> list[int]:
    return [w for w in range(game.n + 1) if floor_form_output(game, w) != threshold_output(game, w)]


def alpha(game: ThresholdGame) -> Fraction:
    """Bias numerator for the (n-1, 1) grouping: Alice's rare input has weight alpha/2^(n-1)."""
    if not game.in_studied_range:
        raise DomainError(f"alpha needs n/2 <= t <= n, got {game}")
    if game.r == game.s:
        return Fraction(1)
    c = binomial(game.n - 1, math.floor(game.t))
    if game.n % game.s != 0:
        return Fraction(c)
    return Fraction(game.r, game.s - game.r) * c
