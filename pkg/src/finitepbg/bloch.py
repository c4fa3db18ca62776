"""Bloch cosine, Chebyshev auxiliaries and the N-period reduction formula.

Everything is evaluated from ``x = cos(beta) = Re(1/t)`` with the
three-term recurrence, so gap frequencies (``|x| > 1``) and band edges
(``|x| = 1``) need no special treatment.

    Xi_N(x)    = sin(N beta) / sin(beta)   (= U_{N-1}(x))
    Theta_N(x) = cos(N beta)               (= T_N(x))
    M^N        = Xi_N M - Xi_{N-1} I
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .core import (
    ScatterAmplitudes,
    TransferMatrix,
    UnitCell,
    cell_amplitudes,
    matrix_from_amplitudes,
)
from .errors import ChebyshevRangeError, DomainError

MAX_PERIODS = 10_000
TRACE_RTOL = 1e-8


@dataclass(frozen=True)
class BlochData:
    x: float | np.ndarray
    in_gap: bool | np.ndarray


@dataclass(frozen=True)
class ChebyshevPair:
    xi: float | np.ndarray
    theta: float | np.ndarray


def bloch_cos(t) -> BlochData:
    """``cos(beta) = Re(1/t)`` for a unit-cell transmission amplitude ``t``."""
    t = np.asarray(t, dtype=complex)
    if np.any(t == 0):
        raise DomainError("t = 0 has no Bloch phase")
    x = t.real / np.abs(t) ** 2
    in_gap = np.abs(x) > 1
    if x.ndim == 0:
        return BlochData(float(x), bool(in_gap))
    return BlochData(x, in_gap)


def _check_order(N: int, lowest: int = -1) -> None:
    if int(N) != N or N < lowest:
        raise DomainError(f"order must be an integer >= {lowest}, got {N!r}")
    if N > MAX_PERIODS:
        raise DomainError(f"N={N} exceeds the supported maximum {MAX_PERIODS}")


def _finite(value, N):
    if not np.all(np.isfinite(value)):
        raise ChebyshevRangeError(f"Chebyshev recurrence overflowed at N={N}")
    return value


def xi_sequence(x, nmax: int) -> np.ndarray:
    """``Xi_k(x)`` for ``k = -1, 0, ..., nmax`` stacked on the leading axis.

    Row ``k + 1`` holds ``Xi_k``.
    """
    _check_order(nmax)
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 2,) + x.shape)
    out[0] = -1.0
    if nmax >= 0:
        out[1] = 0.0
    two_x = 2.0 * x
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(2, nmax + 2):
            out[k] = two_x * out[k - 1] - out[k - 2]
    return _finite(out, nmax)


def chebyshev_xi(x, N: int):
    """``Xi_N(x)``; defined for ``N >= -1`` (``Xi_-1 = -1``, ``Xi_0 = 0``)."""
    _check_order(N)
    x = np.asarray(x, dtype=float)
    prev, cur = -np.ones_like(x), np.zeros_like(x)
    if N == -1:
        return prev if x.ndim else float(prev)
    two_x = 2.0 * x
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(N):
            prev, cur = cur, two_x * cur - prev
    cur = _finite(cur, N)
    return cur if x.ndim else float(cur)


def chebyshev_pair(x, N: int) -> ChebyshevPair:
    """``(Xi_N, Theta_N)`` at Bloch cosine ``x``; ``N >= 0``."""
    _check_order(N, lowest=0)
    xi = chebyshev_xi(x, N)
    xi_prev = chebyshev_xi(x, N - 1)
    theta = np.asarray(x) * xi - xi_prev
    if np.ndim(theta) == 0:
        theta = float(theta)
    return ChebyshevPair(xi, theta)


def chebyshev_xi_derivative(x, N: int):
    """``d Xi_N / dx`` by differentiating the recurrence term by term."""
    _check_order(N, lowest=0)
    x = np.asarray(x, dtype=float)
    p_prev, p = np.zeros_like(x), np.ones_like(x)  # Xi_0, Xi_1
    d_prev, d = np.zeros_like(x), np.zeros_like(x)
    if N == 0:
        return d_prev if x.ndim else 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(N - 1):
            p_prev, p, d_prev, d = p, 2 * x * p - p_prev, d, 2 * p + 2 * x * d - d_prev
    d = _finite(d, N)
    return d if x.ndim else float(d)


def smrf_power(M: TransferMatrix, x, N: int) -> TransferMatrix:
    """``M**N`` as ``Xi_N(x) M - Xi_{N-1}(x) I``.

    ``x`` must agree with ``Re(trace(M)) / 2`` to a relative 1e-8; ``N = 0``
    returns the identity.
    """
    _check_order(N, lowest=0)
    half_trace = np.real(M.half_trace)
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x - half_trace) > TRACE_RTOL * np.maximum(1.0, np.abs(half_trace))):
        raise DomainError("x is inconsistent with trace(M)/2")
    xi_n = chebyshev_xi(x, N)
    xi_nm1 = chebyshev_xi(x, N - 1)
    return M.scale_add_identity(xi_n, -xi_nm1)


def stack_amplitudes(t, r, N: int) -> ScatterAmplitudes:
    """Amplitudes of ``N`` identical cells from the single-cell ``(t, r)``.

    ``1/t_N = Xi_N / t - Xi_{N-1}`` and ``r_N / t_N = (r / t) Xi_N``.
    """
    _check_order(N, lowest=1)
    t = np.asarray(t, dtype=complex)
    r = np.asarray(r, dtype=complex)
    x = bloch_cos(t).x
    xi_n = chebyshev_xi(x, N)
    xi_nm1 = chebyshev_xi(x, N - 1)
    t_n = 1.0 / (xi_n / t - xi_nm1)
    r_n = (r / t) * xi_n * t_n
    if t_n.ndim == 0:
        t_n, r_n = complex(t_n), complex(r_n)
    return ScatterAmplitudes(t_n, r_n)


def stack_matrix(cell: UnitCell, N: int, omega) -> TransferMatrix:
    s = cell_amplitudes(cell, omega)
    return smrf_power(matrix_from_amplitudes(s), bloch_cos(s.t).x, N)


def stack_transmission(cell: UnitCell, N: int, omega) -> ScatterAmplitudes:
    s = cell_amplitudes(cell, omega)
    return stack_amplitudes(s.t, s.r, N)


def transmission_resonances(cell: UnitCell, N: int, omega_min: float, omega_max: float,
                            samples: int = 4096) -> np.ndarray:
    """Frequencies in ``(omega_min, omega_max)`` where ``T_N = 1``.

    For a lossless cell ``T_N = 1 / (1 + (R/T) Xi_N^2)``, so the resonances
    are the sign changes of ``Xi_N(x(omega))``; each bracket is polished with
    Brent's method.
    """
    def xi_of(w):
        return chebyshev_xi(bloch_cos(cell_amplitudes(cell, w).t).x, N)

    grid = np.linspace(omega_min, omega_max, samples)
    vals = xi_of(grid)
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(a)
        elif fa * fb < 0:
            roots.append(brentq(lambda w: float(xi_of(w)), a, b, xtol=1e-15, rtol=1e-15))
    return np.array(sorted(set(roots)))
