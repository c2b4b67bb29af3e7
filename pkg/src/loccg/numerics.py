"""Exact rationals, binomials and a small symmetric eigensolver."""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from loccg.errors import ConvergenceError, DomainError

Rational = Fraction

PSD_TOL = 1e-8


def binomial(n: int, k: int) -> int:
    """C(n, k), with the convention C(n, k) = 0 outside 0 <= k <= n."""
    if n < 0:
        raise DomainError(f"binomial needs n >= 0, got {n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def parse_rational(text: str | int | Fraction) -> Fraction:
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"not a rational number: {text!r}") from exc


def format_rational(q: Fraction) -> str:
    """Decimal-free "p/q" form (denominator always written)."""
    return f"{q.numerator}/{q.denominator}"


def over_power_of_two(q: Fraction, exponent: int) -> str:
    """Write a dyadic q as "m/2^exponent", e.g. 1199/2048 -> "19184/32768" for 15."""
    scaled = q * 2**exponent
    if scaled.denominator != 1:
        raise DomainError(f"{q} is not a multiple of 2^-{exponent}")
    return f"{scaled.numerator}/{2**exponent}"


def sym_matrix(entries) -> np.ndarray:
    """Validate and return a symmetric float matrix."""
    m = np.array(entries, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DomainError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix has non-finite entries")
    if not np.array_equal(m, m.T):
        raise DomainError("matrix is not exactly symmetric")
    return m


def eigen_sym(m, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigen-decomposition of a small dense symmetric matrix.

    Returns ``(eigenvalues, V)`` with eigenvalues ascending and the columns of
    ``V`` the matching orthonormal eigenvectors, so ``m = V diag(w) V^T``.
    Raises ConvergenceError carrying the off-diagonal norm if ``max_sweeps``
    sweeps do not annihilate the off-diagonal part.
    """
    a = sym_matrix(m).copy()
    size = a.shape[0]
    v = np.eye(size)
    scale = float(np.max(np.abs(a)))
    target = np.finfo(float).eps * max(scale, np.finfo(float).tiny) * size

    def off_norm() -> float:
        return float(np.linalg.norm(a - np.diag(np.diag(a))))

    for _ in range(max_sweeps):
        if off_norm() <= target:
            break
        for p in range(size - 1):
            for q in range(p + 1, size):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                if abs(a[q, q] - a[p, p]) > 1e150 * abs(apq):
                    # rotation angle underflows; the entry is already negligible
                    a[p, q] = a[q, p] = 0.0
                    continue
                # Rutishauser's form of the rotation angle
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                a[:, p] = c * ap - s * a[:, q]
                a[:, q] = s * ap + c * a[:, q]
                rp = a[p, :].copy()
                a[p, :] = c * rp - s * a[q, :]
                a[q, :] = s * rp + c * a[q, :]
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
    residual = off_norm()
    if residual > target:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps", residual)

    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def is_psd(m, tol: float = PSD_TOL) -> tuple[bool, float]:
    """(verdict, minimum eigenvalue); verdict is min eigenvalue >= -tol."""
    if tol < 0:
        raise DomainError("tol must be non-negative")
    w, _ = eigen_sym(m)
    lo = float(w[0])
    return lo >= -tol, lo
