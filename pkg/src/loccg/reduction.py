"""Reduce an (n-k, k)-grouped THRESHOLD game to a biased bipartite XOR game.

Each group broadcasts its inputs to one member, so only the two group weights
matter. Alice's weights that already decide the function are merged into a
single input 0 (the ones that force output 1 are absorbed by flipping her
answer); the remaining weights are shifted so that the winning rule becomes
``x + y <= k``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from loccg.errors import ConsistencyError, DomainError
from loccg.games import Grouping, ThresholdGame
from loccg.numerics import binomial, format_rational, parse_rational


@dataclass(frozen=True)
class BiasedGame:
    pA: tuple[Fraction, ...]
    pB: tuple[Fraction, ...]
    signs: tuple[tuple[int, ...], ...]
    provenance: tuple[int, int, Fraction] | None = None  # (n, k, t)

    def __post_init__(self):
        object.__setattr__(self, "pA", tuple(Fraction(p) for p in self.pA))
        object.__setattr__(self, "pB", tuple(Fraction(p) for p in self.pB))
        object.__setattr__(self, "signs", tuple(tuple(int(v) for v in row) for row in self.signs))
        if not self.pA or not self.pB:
            raise DomainError("both input alphabets must be non-empty")
        if len(self.signs) != len(self.pA) or any(len(row) != len(self.pB) for row in self.signs):
            raise DomainError("sign matrix shape does not match the input alphabets")
        if any(v not in (1, -1) for row in self.signs for v in row):
            raise DomainError("signs must be +1 or -1")
        for name, dist in (("pA", self.pA), ("pB", self.pB)):
            if any(p < 0 for p in dist) or sum(dist) != 1:
                raise DomainError(f"{name} is not a probability vector: {dist}")

    @property
    def mA(self) -> int:
        return len(self.pA)

    @property
    def mB(self) -> int:
        return len(self.pB)

    def payoff(self) -> np.ndarray:
        """Float matrix M[i][j] = pA[i] pB[j] signs[i][j]."""
        return np.array(
            [[float(a * b * s) for b, s in zip(self.pB, row)] for a, row in zip(self.pA, self.signs)]
        )

    def integer_payoff(self) -> tuple[list[list[int]], int]:
        """Exact payoff as integers over one common denominator."""
        da = _common_denominator(self.pA)
        db = _common_denominator(self.pB)
        na = [int(p * da) for p in self.pA]
        nb = [int(p * db) for p in self.pB]
        matrix = [[a * b * s for b, s in zip(nb, row)] for a, row in zip(na, self.signs)]
        return matrix, da * db

    def to_dict(self) -> dict:
        doc = {
            "mA": self.mA,
            "mB": self.mB,
            "pA": [format_rational(p) for p in self.pA],
            "pB": [format_rational(p) for p in self.pB],
            "signs": [list(row) for row in self.signs],
        }
        if self.provenance is not None:
            n, k, t = self.provenance
            doc["provenance"] = {"n": n, "k": k, "t": format_rational(Fraction(t) / n)}
        return doc

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, doc: dict) -> BiasedGame:
        prov = doc.get("provenance")
        if prov is not None:
            n = int(prov["n"])
            prov = (n, int(prov["k"]), parse_rational(prov["t"]) * n)
        game = cls(
            pA=[parse_rational(p) for p in doc["pA"]],
            pB=[parse_rational(p) for p in doc["pB"]],
            signs=doc["signs"],
            provenance=prov,
        )
        if game.mA != doc.get("mA", game.mA) or game.mB != doc.get("mB", game.mB):
            raise DomainError("declared alphabet sizes do not match the vectors")
        return game

    @classmethod
    def from_json(cls, text: str) -> BiasedGame:
        return cls.from_dict(json.loads(text))


def _common_denominator(values) -> int:
    return math.lcm(*(v.denominator for v in values))


@dataclass(frozen=True)
class ReductionTrace:
    beta: int
    beta_prime: int
    nu: tuple[int, ...]
    mu: tuple[int, ...]
    w: tuple[int, ...]
    alice_weights: tuple[tuple[int, ...], ...] = field(default=())
    """Original Alice weights folded into each reduced input."""


def beta(game: ThresholdGame, grouping: Grouping) -> tuple[int, int]:
    """The two interval ends used by the reduction.

    Integer weight comparisons use ceil(t) - 1 for "t - 1", which is what the
    strict test ``weight < t`` needs when t is a half-integer.
    """
    n, k = game.n, grouping.k
    top = game.weight_threshold - 1
    if game.t <= n - k:
        return top, n - k
    return n - k, top


def reduce(game: ThresholdGame, grouping: Grouping) -> tuple[BiasedGame, ReductionTrace]:
    grouping.check(game)
    n, k = game.n, grouping.k
    tw = game.weight_threshold
    if tw - k < 0:
        raise DomainError(f"threshold t={game.t} below group size k={k}: reduction unsupported")
    b, b_prime = beta(game, grouping)
    mu = tuple(binomial(n - k, i) for i in range(n - k + 1))
    w = tuple(binomial(k, j) for j in range(k + 1))

    mid = range(tw - k, b + 1)
    nu0 = 2 ** (n - k) - sum(mu[i] for i in mid)
    nu = [nu0] + [mu[tw - k - 1 + x] for x in range(1, n - b_prime + 1)]
    if len(nu) != len(mid) + 1:
        raise ConsistencyError(f"alphabet size {len(nu)} disagrees with {len(mid)} undecided weights")
    if sum(nu) != 2 ** (n - k) or sum(w) != 2**k:
        raise ConsistencyError("reduced input weights are not normalised")

    decided = tuple(a for a in range(n - k + 1) if a not in mid)
    folded = (decided,) + tuple((a,) for a in mid)

    signs = [[1 if x + y <= k else -1 for y in range(k + 1)] for x in range(len(nu))]
    bg = BiasedGame(
        pA=[Fraction(v, 2 ** (n - k)) for v in nu],
        pB=[Fraction(v, 2**k) for v in w],
        signs=signs,
        provenance=(n, k, game.t),
    )
    trace = ReductionTrace(beta=b, beta_prime=b_prime, nu=tuple(nu), mu=mu, w=w, alice_weights=folded)
    return bg, trace


def merge_duplicate_inputs(bg: BiasedGame) -> BiasedGame:
    """Fold inputs whose sign rows (or columns) are identical, adding their probabilities.

    Classical and quantum values are unchanged: identical rows face the same
    optimisation, so an optimal strategy can answer them identically.
    """
    rows: dict[tuple[int, ...], Fraction] = {}
    for p, row in zip(bg.pA, bg.signs):
        rows[row] = rows.get(row, Fraction(0)) + p
    signs = list(rows)
    cols: dict[tuple[int, ...], Fraction] = {}
    for j, q in enumerate(bg.pB):
        col = tuple(row[j] for row in signs)
        cols[col] = cols.get(col, Fraction(0)) + q
    new_signs = [[col[i] for col in cols] for i in range(len(signs))]
    return BiasedGame(pA=list(rows.values()), pB=list(cols.values()), signs=new_signs, provenance=bg.provenance)


def pr_box(bg: BiasedGame) -> np.ndarray:
    """No-signalling box p(a, b | x, y) = 1/2 when a xor b = g(x, y), as exact fractions.

    Indexed ``[x, y, a, b]`` with bits a, b in {0, 1}.
    """
    box = np.empty((bg.mA, bg.mB, 2, 2), dtype=object)
    for x in range(bg.mA):
        for y in range(bg.mB):
            g = 0 if bg.signs[x][y] == 1 else 1
            for a in (0, 1):
                for b_ in (0, 1):
                    box[x, y, a, b_] = Fraction(1, 2) if (a ^ b_) == g else Fraction(0)
    return box


def ns_box_value(bg: BiasedGame) -> Fraction:
    """Game value when Alice and Bob share the box of ``pr_box``."""
    box = pr_box(bg)
    total = Fraction(0)
    for x, px in enumerate(bg.pA):
        for y, qy in enumerate(bg.pB):
            correlator = sum(box[x, y, a, b_] * (-1) ** (a ^ b_) for a in (0, 1) for b_ in (0, 1))
            total += px * qy * bg.signs[x][y] * correlator
    return total


def biased_chsh(p1: Fraction, q1: Fraction, provenance=None) -> BiasedGame:
    """2x2 game that loses only on inputs (1, 1), with P(x=1) = p1 and P(y=1) = q1."""
    p1, q1 = Fraction(p1), Fraction(q1)
    return BiasedGame(pA=[1 - p1, p1], pB=[1 - q1, q1], signs=[[1, 1], [1, -1]], provenance=provenance)
