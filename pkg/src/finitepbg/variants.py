"""Alternate closed-form readings of the boundary-vector and edge-sum formulas.

These are *not* used by the solver.  They exist so the test-suite can show,
term by term, which algebraic reading agrees with the matrix route in
:mod:`finitepbg.fields`.  Each function mirrors a correct counterpart:

=====================================  ======================================
variant here                           authoritative counterpart
=====================================  ======================================
boundary_vectors_squared               fields.boundary_vectors_closed
edge_coefficients_squared / _linear    fields.cell_coefficients_general
qw_boundary_sums_squared               fields.qw_boundary_sums
=====================================  ======================================
"""
from __future__ import annotations

import numpy as np

from .bloch import bloch_cos, chebyshev_xi
from .core import double_boundary, fresnel
from .fields import (
    BoundaryVectors,
    boundary_vectors,
    cell_basis,
    cell_coefficients_general,
    qw_boundary_sums,
)
from .core import quarter_wave_cell, qw_unit_amplitudes
from .errors import SingularBasisError


def _xis(x, N, n):
    return {k: chebyshev_xi(x, k) for k in {N - n - 1, N - n, N - n + 1, N - 1, N}}


def boundary_vectors_squared(t, r, N: int, n: int) -> BoundaryVectors:
    """Boundary vectors with ``t**2`` and ``r**2`` where the amplitudes enter linearly."""
    xi = _xis(bloch_cos(t).x, N, n)
    t2, r2 = t * t, r * r
    den = t2 * xi[N - 1] - xi[N]
    rho = ((t2 * xi[N - n - 1] - xi[N - n]) / den, -r2 * xi[N - n] / den)
    lam = ((t2 * xi[N - n] - xi[N - n + 1]) / den, -r2 * xi[N - n + 1] / den)
    return BoundaryVectors(rho, lam)


def _edge_coefficients(t_pow, r_pow, N, n, f, g, d, t, r):
    xi = _xis(bloch_cos(t).x, N, n)
    tp, rp = t**t_pow, r**r_pow
    right_term = tp * xi[N - n - 1] - (1 + rp) * xi[N - n]
    left_term = tp * xi[N - n] - (1 + rp) * xi[N - n + 1]
    fl, fr, gl, gr = f(d * (n - 1)), f(d * n), g(d * (n - 1)), g(d * n)
    den = (fr * gl - fl * gr) * (tp * xi[N - 1] - xi[N])
    A = (-gr * right_term + gl * left_term) / den
    B = (fr * right_term - fl * left_term) / den
    return A, B


def edge_coefficients_squared(t, r, N, n, f, g, d):
    """``(A_n, B_n)`` with squared amplitudes and the edge terms as arranged there."""
    return _edge_coefficients(2, 2, N, n, f, g, d, t, r)


def edge_coefficients_linear(t, r, N, n, f, g, d):
    """Same arrangement with the amplitudes entering linearly."""
    return _edge_coefficients(1, 1, N, n, f, g, d, t, r)


def qw_boundary_sums_squared(n1: float, n2: float, N: int, n: int, omega: float):
    """Quarter-wave ``(lam_sum, rho_sum)`` with squared Fresnel factors.

    ``rho_sum`` carries ``(1 + R12 e)^2`` and ``lam_sum`` carries
    ``(1 - R12 e)^2``.
    """
    _, r12 = fresnel(n1, n2)
    T12, R12 = double_boundary(n1, n2)
    e = np.exp(1j * np.pi * omega)
    xi = _xis((np.cos(np.pi * omega) - R12) / T12, N, n)
    mix = r12**2 * e**2 * (1 - e) ** 2
    rho_sum = (T12**2 * e**2 * xi[N - n - 1] - (mix + (1 + e * R12) ** 2) * xi[N - n]) / (
        T12**2 * e**2 * xi[N - 1] - (1 + R12 * e) ** 2 * xi[N])
    lam_sum = (T12**2 * e**2 * xi[N - n] - (mix + (1 - e * R12) ** 2) * xi[N - n + 1]) / (
        T12**2 * e**2 * xi[N - 1] - (1 - R12 * e) ** 2 * xi[N])
    return lam_sum, rho_sum


def _rel(a, b):
    a, b = np.asarray(a, complex), np.asarray(b, complex)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def variant_report(n1: float, n2: float, N: int, n: int, omegas, tol: float = 1e-10) -> dict:
    """Max relative deviation of every variant from the matrix route over ``omegas``.

    Returns ``{term: (max_dev, passed)}``.
    """
    cell = quarter_wave_cell(n1, n2)
    d = cell.length
    worst: dict[str, float] = {}

    def record(name, value):
        worst[name] = max(worst.get(name, 0.0), value)

    for w in np.atleast_1d(omegas):
        s = qw_unit_amplitudes(n1, n2, float(w))
        ref = boundary_vectors(s.t, s.r, N, n)
        sq = boundary_vectors_squared(s.t, s.r, N, n)
        for label, got, want in (
            ("rho[0] squared", sq.rho[0], ref.rho[0]),
            ("rho[1] squared", sq.rho[1], ref.rho[1]),
            ("lam[0] squared", sq.lam[0], ref.lam[0]),
            ("lam[1] squared", sq.lam[1], ref.lam[1]),
        ):
            record(label, _rel(got, want))

        lam_sq, rho_sq = qw_boundary_sums_squared(n1, n2, N, n, float(w))
        lam_lin, rho_lin = qw_boundary_sums(n1, n2, N, n, float(w))
        record("qw rho_sum squared", _rel(rho_sq, ref.rho_sum))
        record("qw lam_sum squared", _rel(lam_sq, ref.lam_sum))
        record("qw rho_sum linear", _rel(rho_lin, ref.rho_sum))
        record("qw lam_sum linear", _rel(lam_lin, ref.lam_sum))

        f, g = cell_basis(cell, float(w), origin=(n - 1) * d)
        try:
            A, B = cell_coefficients_general(ref, f, g, n, d)
        except SingularBasisError:
            continue
        for label, fn in (("edge A,B squared", edge_coefficients_squared),
                          ("edge A,B linear", edge_coefficients_linear)):
            Av, Bv = fn(s.t, s.r, N, n, f, g, d)
            record(label, max(_rel(Av, A), _rel(Bv, B)))

    return {k: (v, v <= tol) for k, v in worst.items()}
