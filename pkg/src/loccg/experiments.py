"""Sweeps behind the tables and figures, shared by the CLI and scripts/."""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from loccg.classical import brute_force_value, vc_half_half
from loccg.errors import DomainError
from loccg.games import Grouping, ThresholdGame, alpha, majority
from loccg.quantum import (
    SolverConfig,
    dual_majority_conjecture,
    evaluate_protocol,
    k1_biased_game,
    protocol1,
    quantum_value,
    vq_threshold_formula,
)
from loccg.reduction import reduce

log = logging.getLogger(__name__)

EQUAL_TOL = 1e-6  # quantum - classical below this counts as "no advantage"


def thread_count() -> int:
    raw = os.environ.get("LOCCG_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def ordered_map(fn, items) -> list:
    """map() over a thread pool capped by LOCCG_THREADS; results keep input order."""
    items = list(items)
    workers = min(thread_count(), max(1, len(items)))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class Table3Row:
    n: int
    vq: float
    vc: Fraction
    certified: bool
    thetaA: tuple[float, ...]
    phiB: tuple[float, ...]

    @property
    def ratio(self) -> float:
        return self.vq / float(self.vc)


def _table3_row(n: int, cfg: SolverConfig) -> Table3Row:
    game, grouping = majority(n), Grouping(2)
    res = quantum_value(game, grouping, cfg)
    vc, _ = brute_force_value(res.game)
    qp = res.protocol
    return Table3Row(
        n, res.value, vc, res.certificate.certified, qp.thetaA if qp else (), qp.phiB if qp else ()
    )


def table3(cfg: SolverConfig = SolverConfig(), ns=range(4, 11)) -> list[Table3Row]:
    """MAJORITY with Bob holding two players, n = 4..10."""
    return ordered_map(lambda n: _table3_row(n, cfg), ns)


@dataclass(frozen=True)
class BoundaryCheck:
    n: int
    k: int
    vc: Fraction
    vq: float
    certified: bool
    method: str  # "conjecture" or "kkt"

    @property
    def no_advantage(self) -> bool:
        return self.certified and self.vq - float(self.vc) <= EQUAL_TOL


def majority_boundary_check(n: int, k: int, cfg: SolverConfig = SolverConfig()) -> BoundaryCheck:
    """Decide whether grouping (n-k, k) of MAJORITY still has a quantum advantage.

    The exact dual proposed for MAJORITY is tried first; when it fails the
    SDP is solved and its KKT certificate is used instead.
    """
    conj = dual_majority_conjecture(n, k, cfg.psd_tol, cfg.gap_tol)
    bg, _ = reduce(majority(n), Grouping(k))
    vc, _ = brute_force_value(bg)
    if conj.certified:
        return BoundaryCheck(n, k, vc, conj.dual_value, True, "conjecture")
    res = quantum_value(majority(n), Grouping(k), cfg)
    return BoundaryCheck(n, k, vc, res.value, res.certificate.certified, "kkt")


def sweep_nk(k: int, n_max: int, cfg: SolverConfig = SolverConfig()) -> BoundaryCheck | None:
    """Smallest even n >= 2k at which the MAJORITY quantum advantage vanishes, if any up to n_max."""
    if k < 2 or k % 2:
        raise DomainError(f"the n_k sweep runs over even k >= 2, got k={k}")
    for n in range(2 * k, n_max + 1, 2):
        chk = majority_boundary_check(n, k, cfg)
        log.info("k=%d n=%d vq=%.10f vc=%.10f %s", k, n, chk.vq, float(chk.vc), chk.method)
        if chk.no_advantage:
            return chk
    return None


@dataclass(frozen=True)
class GridRow:
    n: int
    t: int
    vq: float
    protocol_value: float

    @property
    def winning_probability(self) -> float:
        return (1 + self.vq) / 2


def grid(n_max: int) -> list[GridRow]:
    """The optimal EPR protocol for the (n-1, 1) grouping over integer thresholds n/2 <= t <= n."""
    rows = []
    for n in range(2, n_max + 1):
        for t in range(math.ceil(n / 2), n + 1):
            game = ThresholdGame.from_threshold(n, t)
            a = alpha(game)
            vq = vq_threshold_formula(n, a)
            rows.append(GridRow(n, t, vq, evaluate_protocol(k1_biased_game(n, a), protocol1(n, a))))
    return rows


@dataclass(frozen=True)
class ScalingRow:
    n: int
    vc_formula: Fraction
    vc_bruteforce: Fraction
    vq: float
    certified: bool

    @property
    def gap(self) -> float:
        return self.vq - float(self.vc_formula)

    @property
    def gap_bruteforce(self) -> float:
        return self.vq - float(self.vc_bruteforce)


def _scaling_row(n: int, cfg: SolverConfig) -> ScalingRow:
    res = quantum_value(majority(n), Grouping(n // 2), cfg)
    vc, _ = brute_force_value(res.game)
    return ScalingRow(n, vc_half_half(n), vc, res.value, res.certificate.certified)


def majority_scaling(n_max: int, cfg: SolverConfig = SolverConfig(), n_min: int = 4) -> list[ScalingRow]:
    """MAJORITY split into two equal halves, even n from n_min to n_max."""
    return ordered_map(lambda n: _scaling_row(n, cfg), range(n_min, n_max + 1, 2))
