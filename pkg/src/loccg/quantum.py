"""Quantum values of biased XOR games through Tsirelson's vector program.

The optimum of sum_ij M_ij <u_i, v_j> over unit vectors is found by
alternating maximisation; optimality is certified by a dual vector lambda
with K = 2 diag(lambda) - W positive semidefinite.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from loccg.classical import brute_force_value, vc_and
from loccg.errors import ConsistencyError, DomainError, ExtractionError
from loccg.games import Grouping, ThresholdGame, and_game, majority
from loccg.numerics import PSD_TOL, binomial, eigen_sym, is_psd, sym_matrix
from loccg.reduction import BiasedGame, biased_chsh, merge_duplicate_inputs, reduce

log = logging.getLogger(__name__)

GAP_TOL = 1e-7
_PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
_PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
_EPR = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2.0)


@dataclass(frozen=True)
class SolverConfig:
    dimension: int | None = None  # default mA + mB
    restarts: int = 32
    seed: int = 0
    max_iter: int = 10000
    tol: float = 1e-13
    psd_tol: float = PSD_TOL
    gap_tol: float = GAP_TOL


@dataclass
class PrimalSolution:
    uA: np.ndarray  # (mA, d) unit rows
    vB: np.ndarray  # (mB, d) unit rows
    value: float
    converged: bool = True
    iterations: int = 0
    restart: int = 0

    @property
    def vectors(self) -> np.ndarray:
        return np.vstack([self.uA, self.vB])

    @property
    def gram(self) -> np.ndarray:
        b = self.vectors
        g = b @ b.T
        return (g + g.T) / 2


@dataclass
class DualCertificate:
    lam: np.ndarray
    dual_value: float
    min_eig_K: float
    certified: bool
    gap: float
    reference: float | None = None  # primal value the dual is compared against

    @property
    def upper_bound(self) -> float:
        """Rigorous bound on the vector-program optimum, valid even if K is slightly indefinite."""
        return self.dual_value + max(0.0, -self.min_eig_K) * len(self.lam) / 2

    def to_dict(self) -> dict:
        return {
            "dual_value": self.dual_value,
            "min_eig_K": self.min_eig_K,
            "certified": self.certified,
            "gap": self.gap,
            "lambda": [float(v) for v in self.lam],
        }


def _wrap(angle: float) -> float:
    """Map to (-pi, pi]."""
    a = math.remainder(angle, 2 * math.pi)
    return math.pi if a == -math.pi else a


@dataclass(frozen=True)
class QuantumProtocol:
    """Planar observables cos(a) X - sin(a) Z on a shared EPR pair."""

    thetaA: tuple[float, ...]
    phiB: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "thetaA", tuple(_wrap(float(a)) for a in self.thetaA))
        object.__setattr__(self, "phiB", tuple(_wrap(float(a)) for a in self.phiB))

    def to_dict(self) -> dict:
        return {"thetaA": list(self.thetaA), "phiB": list(self.phiB)}


def observable(angle: float) -> np.ndarray:
    return math.cos(angle) * _PAULI_X - math.sin(angle) * _PAULI_Z


def weight_matrix(bg: BiasedGame) -> np.ndarray:
    m = bg.payoff()
    w = np.zeros((bg.mA + bg.mB, bg.mA + bg.mB))
    w[: bg.mA, bg.mA :] = m
    w[bg.mA :, : bg.mA] = m.T
    return sym_matrix(w)


def _normalize_rows(x: np.ndarray, previous: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1)
    out = previous.copy()
    ok = norms > 0
    out[ok] = x[ok] / norms[ok, None]
    return out


def _random_unit_rows(rng: np.random.Generator, rows: int, d: int) -> np.ndarray:
    x = rng.standard_normal((rows, d))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def restart_generators(seed: int, restarts: int) -> list[np.random.Generator]:
    """Independent counter-based streams, one per restart, all derived from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(restarts)
    return [np.random.Generator(np.random.Philox(c)) for c in children]


def solve_primal(bg: BiasedGame, cfg: SolverConfig = SolverConfig()) -> PrimalSolution:
    """Best of ``cfg.restarts`` alternating-maximisation runs from random unit vectors."""
    m = bg.payoff()
    d = cfg.dimension or bg.mA + bg.mB
    best: PrimalSolution | None = None
    for index, rng in enumerate(restart_generators(cfg.seed, cfg.restarts)):
        u = _random_unit_rows(rng, bg.mA, d)
        v = _random_unit_rows(rng, bg.mB, d)
        value = -np.inf
        converged = False
        it = 0
        for it in range(1, cfg.max_iter + 1):
            v = _normalize_rows(m.T @ u, v)
            u = _normalize_rows(m @ v, u)
            new = float(np.sum(m * (u @ v.T)))
            if new - value <= cfg.tol * max(abs(new), 1e-300):
                value = max(value, new)
                converged = True
                break
            value = new
        sol = PrimalSolution(u, v, value, converged, it, index)
        if best is None or sol.value > best.value:
            best = sol
    if not best.converged:
        log.warning("alternating maximisation hit the iteration cap (%d)", cfg.max_iter)
    return best


def certificate_from_lambda(
    bg: BiasedGame,
    lam,
    reference: float | None = None,
    psd_tol: float = PSD_TOL,
    gap_tol: float = GAP_TOL,
) -> DualCertificate:
    """Check a dual vector: K = 2 diag(lam) - W must be PSD and sum(lam) match ``reference``."""
    lam = np.asarray([float(v) for v in lam])
    if lam.shape != (bg.mA + bg.mB,):
        raise DomainError(f"dual vector needs {bg.mA + bg.mB} entries, got {lam.shape}")
    k = 2 * np.diag(lam) - weight_matrix(bg)
    psd, lo = is_psd(k, psd_tol)
    dual = float(np.sum(lam))
    gap = abs(dual - reference) if reference is not None else 0.0
    return DualCertificate(lam, dual, lo, psd and gap <= gap_tol, gap, reference)


def dual_from_primal(
    bg: BiasedGame, ps: PrimalSolution, psd_tol: float = PSD_TOL, gap_tol: float = GAP_TOL
) -> DualCertificate:
    """Complementary-slackness dual: lam_i = 1/2 sum_j W_ij <x_i, x_j>."""
    m = bg.payoff()
    corr = ps.uA @ ps.vB.T
    lam = np.concatenate([0.5 * np.sum(m * corr, axis=1), 0.5 * np.sum(m * corr, axis=0)])
    return certificate_from_lambda(bg, lam, ps.value, psd_tol, gap_tol)


def dual_from_protocol(bg: BiasedGame, qp: QuantumProtocol, **kwargs) -> DualCertificate:
    """Same construction with correlations cos(theta_i - phi_j) read off planar angles."""
    m = bg.payoff()
    corr = np.cos(np.subtract.outer(qp.thetaA, qp.phiB))
    lam = np.concatenate([0.5 * np.sum(m * corr, axis=1), 0.5 * np.sum(m * corr, axis=0)])
    return certificate_from_lambda(bg, lam, evaluate_protocol(bg, qp), **kwargs)


def and_biased_game(n: int, k: int) -> BiasedGame:
    """The AND reduction with Bob's indistinguishable weights merged: a 2x2 biased CHSH game."""
    bg, _ = reduce(and_game(n), Grouping(k))
    return merge_duplicate_inputs(bg)


def dual_and_closed_form(n: int, k: int, psd_tol: float = PSD_TOL, gap_tol: float = GAP_TOL) -> DualCertificate:
    vc = vc_and(n, k)
    lam = [
        Fraction(1, 2) - Fraction(1, 2 ** (n - k + 1)),
        Fraction(1, 2 ** (n - k + 1)) - Fraction(1, 2**n),
        Fraction(1, 2) - Fraction(1, 2 ** (k + 1)),
        Fraction(1, 2 ** (k + 1)) - Fraction(1, 2**n),
    ]
    if sum(lam) != vc:
        raise ConsistencyError("closed-form AND dual does not sum to the classical value")
    return certificate_from_lambda(and_biased_game(n, k), lam, float(vc), psd_tol, gap_tol)


def majority_conjecture_lambda(n: int, k: int) -> list[Fraction]:
    """Exact dual vector [lam_0..lam_k, sigma_0..sigma_k] proposed for MAJORITY (n-k, k)."""
    if not 2 <= k <= n // 2:
        raise DomainError(f"need 2 <= k <= n/2, got n={n}, k={k}")
    t = majority(n).weight_threshold

    def mu(i):
        return binomial(n - k, i)

    def w(j):
        return binomial(k, j)

    def wsum(lo, hi):
        return sum(w(j) for j in range(lo, hi + 1))

    lam = [Fraction(0)] * (k + 1)
    sig = [Fraction(0)] * (k + 1)
    lam[0] = Fraction(1, 2) - Fraction(sum(mu(t - i) for i in range(1, k + 1)), 2 ** (n - k + 1))
    if k % 2 == 0:
        h = k // 2
        for i in range(1, h + 1):
            lam[i] = Fraction(mu(t - k + i - 1) * wsum(i, k - i), 2 ** (n + 1))
            lam[h + i] = Fraction(mu(t - h + i - 1) * wsum(h - i + 1, h + i - 1), 2 ** (n + 1))
        sig[h] = Fraction(w(h), 2 ** (k + 1))
        for i in range(h):
            sig[i] = Fraction(w(i) * (2 ** (n - k - 1) - sum(mu(t - j) for j in range(i + 1, h + 1))), 2**n)
        for i in range(h + 1, k + 1):
            sig[i] = Fraction(w(i) * (2 ** (n - k - 1) - sum(mu(t - j) for j in range(h + 1, i + 1))), 2**n)
    else:
        h = (k - 1) // 2
        for i in range(1, h + 1):
            lam[i] = Fraction(mu(t - k + i - 1) * wsum(i, k - i), 2 ** (n + 1))
            lam[i + h + 1] = Fraction(mu(t - h - 1 + i) * wsum(h - i + 1, h + i), 2 ** (n + 1))
        lam[h + 1] = Fraction(0)
        delta = 2 ** (n - k) - mu(t - h - 1)
        sig[h] = sig[h + 1] = Fraction(w(h + 1) * delta, 2 ** (n + 1))
        for i in range(h):
            sig[i] = Fraction(w(i) * (delta - 2 * sum(mu(t - j) for j in range(i + 1, h + 1))), 2 ** (n + 1))
        for i in range(h + 2, k + 1):
            sig[i] = Fraction(w(i) * (delta - 2 * sum(mu(t - j) for j in range(h + 2, i + 1))), 2 ** (n + 1))
    return lam + sig


def dual_majority_conjecture(
    n: int, k: int, psd_tol: float = PSD_TOL, gap_tol: float = GAP_TOL
) -> DualCertificate:
    """Check the proposed MAJORITY dual against the exact classical optimum.

    When certified, the quantum value equals the classical one.
    """
    bg, _ = reduce(majority(n), Grouping(k))
    vc, _ = brute_force_value(bg)
    return certificate_from_lambda(bg, majority_conjecture_lambda(n, k), float(vc), psd_tol, gap_tol)


def vq_squared(n: int, alpha_val) -> Fraction:
    """Exact square of the (n-1, 1) quantum value: 2((2^(n-2) - alpha)^2 + 4^(n-2)) / 4^(n-1)."""
    a = Fraction(alpha_val)
    h = Fraction(2) ** (n - 2)
    return 2 * ((h - a) ** 2 + h**2) / Fraction(4) ** (n - 1)


def vq_threshold_formula(n: int, alpha_val) -> float:
    a = float(alpha_val)
    return math.sqrt(2.0) * math.sqrt((2.0 ** (n - 2) - a) ** 2 + (2.0 ** (n - 2)) ** 2) / 2.0 ** (n - 1)


def k1_biased_game(n: int, alpha_val) -> BiasedGame:
    return biased_chsh(Fraction(alpha_val) / 2 ** (n - 1), Fraction(1, 2))


def protocol1(n: int, alpha_val) -> QuantumProtocol:
    """Optimal EPR measurements for the (n-1, 1) biased CHSH game.

    Alice's two observables are orthogonal in the X-Z plane; Bob's are the
    reflections c D_0 + s D_1 and c D_0 - s D_1, the second being (X + Z)/sqrt(2).
    """
    if n < 2:
        raise DomainError("the (n-1, 1) protocol needs n >= 2")
    a = Fraction(alpha_val)
    h = Fraction(2) ** (n - 2)
    big = Fraction(2) ** (2 * n - 3)
    norm2 = a**2 - 2 ** (n - 1) * a + big
    nd = math.sqrt(norm2)
    bob_scale = math.sqrt(2) * float(norm2)
    # (X coefficient, Z coefficient) of D_0, D_1, C_0, C_1
    coeffs = [
        (float(h) / nd, float(h - a) / nd),
        (float(h - a) / nd, -float(h) / nd),
        (float(big - a**2) / bob_scale, float(a**2 - 2**n * a + big) / bob_scale),
        (1 / math.sqrt(2), 1 / math.sqrt(2)),
    ]
    for cx, cz in coeffs:
        if abs(math.hypot(cx, cz) - 1) > 1e-12:
            raise ConsistencyError(f"observable has norm {math.hypot(cx, cz)}")
    # cos(a) X - sin(a) Z  =>  a = atan2(-cz, cx)
    angles = [math.atan2(-cz, cx) for cx, cz in coeffs]
    return QuantumProtocol(angles[:2], angles[2:])


def dual_biased_chsh_closed_form(n: int, alpha_val, **kwargs) -> DualCertificate:
    """Closed-form dual for the (n-1, 1) game, halved so that sum(lam) equals the value."""
    a = float(alpha_val)
    s = math.sqrt((2.0 ** (n - 2) - a) ** 2 + (2.0 ** (n - 2)) ** 2)
    root2 = math.sqrt(2.0)
    printed = [
        (2.0 ** (n - 1) - a) ** 2 / (2.0 ** (n - 1) * root2 * s),
        a**2 / (2.0 ** (n - 1) * root2 * s),
        (a**2 + (2.0 ** (n - 1) - a) ** 2) / (2.0**n * root2 * s),
    ]
    printed.append(printed[2])
    lam = [v / 2 for v in printed]
    return certificate_from_lambda(k1_biased_game(n, alpha_val), lam, vq_threshold_formula(n, alpha_val), **kwargs)


def _tensor_correlation(theta: float, phi: float) -> float:
    op = np.kron(observable(theta), observable(phi))
    return float(_EPR @ op @ _EPR)


def evaluate_protocol(bg: BiasedGame, qp: QuantumProtocol) -> float:
    """Game value of the planar EPR protocol.

    Uses <D_i (x) C_j> = cos(theta_i - phi_j) and re-derives every correlator
    from the explicit two-qubit state as a cross-check.
    """
    if len(qp.thetaA) != bg.mA or len(qp.phiB) != bg.mB:
        raise DomainError("protocol shape does not match the game")
    m = bg.payoff()
    corr = np.cos(np.subtract.outer(qp.thetaA, qp.phiB))
    tensor = np.array([[_tensor_correlation(a, b) for b in qp.phiB] for a in qp.thetaA])
    if np.max(np.abs(corr - tensor)) > 1e-12:
        raise ConsistencyError("cosine and tensor-product correlators disagree")
    return float(np.sum(m * corr))


def extract_observables(ps: PrimalSolution, rank_tol: float = 1e-8, match_tol: float = 1e-9) -> QuantumProtocol:
    """Read planar EPR measurement angles off a (numerically) rank-two solution."""
    g = ps.gram
    w, vecs = eigen_sym(g)
    trace = float(np.sum(w))
    captured = float(w[-1] + w[-2]) / trace if len(w) > 1 else 1.0
    if captured < 1 - rank_tol:
        raise ExtractionError("solution is not planar (rank > 2)", 1 - captured)
    coords = vecs[:, -2:] * np.sqrt(np.clip(w[-2:], 0, None))
    raw = np.arctan2(coords[:, 0], coords[:, 1])
    angles = raw - raw[0]
    # fix the global reflection: first angle off the reference axis is positive
    for a in angles[1:]:
        s = math.sin(a)
        if abs(s) > 1e-9:
            if s < 0:
                angles = -angles
            break
    ma = ps.uA.shape[0]
    angles = np.array([_wrap(a) for a in angles])
    rebuilt = np.cos(np.subtract.outer(angles, angles))
    err = float(np.max(np.abs(rebuilt - g)))
    if err > match_tol:
        raise ExtractionError("planar angles do not reproduce the Gram matrix", err)
    return QuantumProtocol(angles[:ma], angles[ma:])


@dataclass
class QuantumResult:
    value: float
    certificate: DualCertificate
    protocol: QuantumProtocol | None
    primal: PrimalSolution = field(repr=False)
    game: BiasedGame = field(repr=False)


def quantum_value(game: ThresholdGame, grouping: Grouping, cfg: SolverConfig = SolverConfig()) -> QuantumResult:
    bg, _ = reduce(game, grouping)
    return solve_biased(bg, cfg)


def solve_biased(bg: BiasedGame, cfg: SolverConfig = SolverConfig()) -> QuantumResult:
    ps = solve_primal(bg, cfg)
    cert = dual_from_primal(bg, ps, cfg.psd_tol, cfg.gap_tol)
    try:
        protocol = extract_observables(ps)
    except ExtractionError as exc:
        log.info("no planar protocol: %s", exc)
        protocol = None
    if not cert.certified:
        log.warning("quantum value %.12f is not certified (min eig %.3e)", ps.value, cert.min_eig_K)
    return QuantumResult(ps.value, cert, protocol, ps, bg)
