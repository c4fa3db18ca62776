"""Modal fields inside the n-th cell of an N-period stack, stack energy and normalisation.

The authoritative field comes from propagating the stack's outer boundary
vectors inward with the reduction formula, then carrying the full
(forward, backward) amplitude pair through the layers of the cell.  Two
further routes are kept and cross-checked in the tests:

* :func:`cell_coefficients_general` solves for the coefficients of a pair of
  basis solutions from the field values at the two cell edges.  It is
  singular whenever the cell has a Dirichlet resonance (e.g. midgap of a
  quarter-wave cell) and raises :class:`SingularBasisError` there.
* :func:`qw_cell_field` is the quarter-wave closed form in cos/sin
  coefficients.

Positions inside a cell are cell-local, ``0 <= x <= d``; the cell starts at
global position ``(n - 1) d``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from .bloch import bloch_cos, chebyshev_xi, smrf_power, stack_amplitudes
from .core import (
    ScatterAmplitudes,
    UnitCell,
    cell_amplitudes,
    double_boundary,
    fresnel,
    matrix_from_amplitudes,
    quarter_wave_cell,
    qw_unit_amplitudes,
)
from .errors import DomainError, SingularBasisError
from .oracle import interface_matrix

BASIS_RTOL = 1e-12
# |sin(pi w)| below this: switch the quarter-wave closed form to its regular variant
QW_CSC_GUARD = 1e-6


@dataclass(frozen=True)
class BoundaryVectors:
    """Ambient amplitudes at the right (``rho``) and left (``lam``) edge of cell n."""

    rho: tuple
    lam: tuple

    @property
    def rho_sum(self):
        return self.rho[0] + self.rho[1]

    @property
    def lam_sum(self):
        return self.lam[0] + self.lam[1]


@dataclass(frozen=True)
class CellField:
    """Field in cell ``n`` as ``E(x) = P_j cos(k_j x) + Q_j sin(k_j x)`` in layer ``j``.

    ``coeffs`` has shape ``(layers, 2)`` holding ``(P_j, Q_j)``; ``x`` is
    cell-local.  For a quarter-wave cell the rows are ``(A_n, B_n)`` and
    ``(C_n, D_n)``.
    """

    cell: UnitCell
    n: int
    omega: float
    coeffs: np.ndarray

    @property
    def wavenumbers(self) -> np.ndarray:
        return self.cell.indices * self.cell.k0 * self.omega

    @property
    def origin(self) -> float:
        return (self.n - 1) * self.cell.length

    def _layer_ids(self, x):
        edges = self.cell.interfaces
        if np.any(x < -1e-12 * edges[-1]) or np.any(x > edges[-1] * (1 + 1e-12)):
            raise DomainError("position outside the cell")
        j = np.searchsorted(edges, x, side="right") - 1
        return np.clip(j, 0, len(self.cell.layers) - 1)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        j = self._layer_ids(x)
        k = self.wavenumbers[j]
        out = self.coeffs[j, 0] * np.cos(k * x) + self.coeffs[j, 1] * np.sin(k * x)
        return complex(out) if out.ndim == 0 else out

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        j = self._layer_ids(x)
        k = self.wavenumbers[j]
        out = k * (-self.coeffs[j, 0] * np.sin(k * x) + self.coeffs[j, 1] * np.cos(k * x))
        return complex(out) if out.ndim == 0 else out

    def in_layer(self, j: int, s):
        """Field at layer-local position ``s`` in ``[0, L_j]`` of layer ``j``."""
        s = np.asarray(s, dtype=float)
        k = self.wavenumbers[j]
        x = self.cell.interfaces[j] + s
        return self.coeffs[j, 0] * np.cos(k * x) + self.coeffs[j, 1] * np.sin(k * x)

    def derivative_in_layer(self, j: int, s):
        s = np.asarray(s, dtype=float)
        k = self.wavenumbers[j]
        x = self.cell.interfaces[j] + s
        return k * (-self.coeffs[j, 0] * np.sin(k * x) + self.coeffs[j, 1] * np.cos(k * x))

    def intensity(self, x):
        return np.abs(self(x)) ** 2

    def scaled(self, factor) -> "CellField":
        return replace(self, coeffs=self.coeffs * factor)

    def layer_energy(self, j: int) -> float:
        """``n_j^2 * integral |E|^2`` over layer ``j`` in closed form."""
        P, Q = self.coeffs[j]
        k = self.wavenumbers[j]
        x1, x2 = self.cell.interfaces[j], self.cell.interfaces[j + 1]
        L = x2 - x1
        F, G = (P - 1j * Q) / 2, (P + 1j * Q) / 2
        cross = np.exp(1j * k * (x1 + x2)) * L * np.sinc(k * L / np.pi)
        integral = (abs(F) ** 2 + abs(G) ** 2) * L + 2 * np.real(F * np.conj(G) * cross)
        return float(self.cell.layers[j].index ** 2 * integral)

    def layer_energy_quad(self, j: int) -> float:
        x1, x2 = self.cell.interfaces[j], self.cell.interfaces[j + 1]
        val, _ = quad(lambda s: abs(self.in_layer(j, s - x1)) ** 2, x1, x2,
                      epsabs=1e-13, epsrel=1e-10, limit=200)
        return float(self.cell.layers[j].index ** 2 * val)


@dataclass(frozen=True)
class StackEnergy:
    total: float
    per_cell: tuple


def _check_cell_number(N: int, n: int) -> None:
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N!r}")
    if int(n) != n or not 1 <= n <= N:
        raise DomainError(f"cell number n={n!r} outside [1, {N}]")


def boundary_vectors(t, r, N: int, n: int) -> BoundaryVectors:
    """Boundary vectors of cell ``n``: ``rho_n = M^(N-n) rho_N``, ``lam_n = M^(N-n+1) rho_N``.

    ``rho_N = (t_N, 0)`` is the outgoing wave at the right edge of the stack.
    """
    _check_cell_number(N, n)
    m = matrix_from_amplitudes(ScatterAmplitudes(t, r))
    x = bloch_cos(t).x
    t_n = stack_amplitudes(t, r, N).t
    right = (t_n, 0.0 * t_n)
    rho = smrf_power(m, x, N - n).apply(right)
    lam = smrf_power(m, x, N - n + 1).apply(right)
    return BoundaryVectors(rho, lam)


def boundary_vectors_closed(t, r, N: int, n: int) -> BoundaryVectors:
    """Closed-form boundary vectors in the unit-cell ``t``, ``r`` and ``Xi_k``::

        rho_n = (t Xi_{N-n-1} - Xi_{N-n},   -r Xi_{N-n})   / (t Xi_{N-1} - Xi_N)
        lam_n = (t Xi_{N-n}   - Xi_{N-n+1}, -r Xi_{N-n+1}) / (t Xi_{N-1} - Xi_N)
    """
    _check_cell_number(N, n)
    x = bloch_cos(t).x
    xi = {k: chebyshev_xi(x, k) for k in {N - n - 1, N - n, N - n + 1, N - 1, N}}
    den = t * xi[N - 1] - xi[N]
    rho = ((t * xi[N - n - 1] - xi[N - n]) / den, -r * xi[N - n] / den)
    lam = ((t * xi[N - n] - xi[N - n + 1]) / den, -r * xi[N - n + 1] / den)
    return BoundaryVectors(rho, lam)


def _coeffs_from_amplitudes(cell: UnitCell, omega: float, lam) -> np.ndarray:
    """Carry the ambient amplitude pair ``lam`` through the layers of ``cell``."""
    v = np.array(lam, dtype=complex)
    coeffs = np.empty((len(cell.layers), 2), dtype=complex)
    edges = cell.interfaces
    for j, layer in enumerate(cell.layers):
        k = layer.index * cell.k0 * omega
        f_in, b_in = interface_matrix(layer.index, cell.ambient_index).apply(v)
        # layer-local exponentials -> cell-local cos/sin
        F = f_in * np.exp(-1j * k * edges[j])
        G = b_in * np.exp(1j * k * edges[j])
        coeffs[j] = (F + G, 1j * (F - G))
        L = layer.thickness
        v = np.array(interface_matrix(cell.ambient_index, layer.index).apply(
            (f_in * np.exp(1j * k * L), b_in * np.exp(-1j * k * L))), dtype=complex)
    return coeffs


def cell_field(cell: UnitCell, N: int, n: int, omega: float) -> CellField:
    """Unnormalised field in cell ``n`` for unit incidence from the left."""
    s = cell_amplitudes(cell, float(omega))
    bv = boundary_vectors(s.t, s.r, N, n)
    return CellField(cell, n, float(omega), _coeffs_from_amplitudes(cell, float(omega), bv.lam))


def stack_fields(cell: UnitCell, N: int, omega: float) -> list[CellField]:
    return [cell_field(cell, N, n, omega) for n in range(1, N + 1)]


def cell_basis(cell: UnitCell, omega: float, origin: float = 0.0):
    """Fundamental solutions of the cell as functions of global ``x``.

    ``f(origin) = 1, f'(origin) = 0`` and ``g(origin) = 0, g'(origin) = 1``.
    ``g`` uses ``sin(k s)/k``, so the pair stays independent as ``omega -> 0``
    (it tends to ``(1, x - origin)``).  Valid on ``[origin, origin + d]``.
    """
    edges = cell.interfaces
    ks = cell.indices * cell.k0 * omega
    # (E, E') at the left edge of each layer for both solutions
    starts = [np.eye(2)]
    for j, k in enumerate(ks[:-1]):
        starts.append(_layer_step(k, cell.thicknesses[j]) @ starts[-1])

    def make(col):
        def fn(x):
            s_all = np.asarray(x, dtype=float) - origin
            j = np.clip(np.searchsorted(edges, s_all, side="right") - 1, 0, len(ks) - 1)
            s = s_all - edges[j]
            k = ks[j]
            E0 = np.array([starts[i][0, col] for i in range(len(ks))])[j]
            dE0 = np.array([starts[i][1, col] for i in range(len(ks))])[j]
            out = E0 * np.cos(k * s) + dE0 * s * np.sinc(k * s / np.pi)
            return float(out) if out.ndim == 0 else out
        return fn

    return make(0), make(1)


def _layer_step(k: float, L: float) -> np.ndarray:
    return np.array([[np.cos(k * L), L * np.sinc(k * L / np.pi)], [-k * np.sin(k * L), np.cos(k * L)]])


def cell_coefficients_general(bv: BoundaryVectors, f: Callable, g: Callable, n: int, d: float):
    """Coefficients ``(A_n, B_n)`` of ``E_n = A_n f + B_n g`` on ``[(n-1)d, nd]``.

    The field must equal the summed left boundary vector at ``(n-1) d`` and
    the summed right boundary vector at ``n d``::

        A_n = (rho_sum g(left) - lam_sum g(right)) / W
        B_n = (lam_sum f(right) - rho_sum f(left)) / W
        W   = f(right) g(left) - f(left) g(right)

    Raises SingularBasisError when ``|W|`` is below 1e-12 of its scale.
    """
    left, right = d * (n - 1), d * n
    fl, fr, gl, gr = f(left), f(right), g(left), g(right)
    W = fr * gl - fl * gr
    # g may vanish at both edges (that is the degenerate case), so size it inside the cell
    probe = np.linspace(left, right, 33)
    scale = max(np.max(np.abs(f(probe))) * np.max(np.abs(g(probe))), np.finfo(float).tiny)
    if abs(W) < BASIS_RTOL * scale:
        raise SingularBasisError(
            "edge values do not determine the field (Dirichlet resonance or dependent basis)")
    A = (bv.rho_sum * gl - bv.lam_sum * gr) / W
    B = (bv.lam_sum * fr - bv.rho_sum * fl) / W
    return A, B


def qw_boundary_sums(n1: float, n2: float, N: int, n: int, omega: float):
    """``(lam_sum, rho_sum)`` for cell n of a quarter-wave stack in closed form.

    With ``e = exp(i pi w)`` and ``S = 1 - R12 e + r12 (e^2 - e)``::

        rho_sum = (T12 e Xi_{N-n-1} - S Xi_{N-n})   / (T12 e Xi_{N-1} - (1 - R12 e) Xi_N)
        lam_sum = (T12 e Xi_{N-n}   - S Xi_{N-n+1}) / (same)
    """
    _check_cell_number(N, n)
    _, r12 = fresnel(n1, n2)
    T12, R12 = double_boundary(n1, n2)
    e = np.exp(1j * np.pi * omega)
    x = (np.cos(np.pi * omega) - R12) / T12
    xi = {k: chebyshev_xi(x, k) for k in {N - n - 1, N - n, N - n + 1, N - 1, N}}
    S = 1 - R12 * e + r12 * (e * e - e)
    den = T12 * e * xi[N - 1] - (1 - R12 * e) * xi[N]
    rho_sum = (T12 * e * xi[N - n - 1] - S * xi[N - n]) / den
    lam_sum = (T12 * e * xi[N - n] - S * xi[N - n + 1]) / den
    return lam_sum, rho_sum


def qw_coefficients(n1: float, n2: float, omega: float, lam_sum, rho_sum):
    """``(A, B, C, D)`` of the quarter-wave cell field from the summed edge values.

    With ``dn = (n1 - n2)/(n1 + n2)`` and ``w = omega``::

        A = lam_sum
        B = [(dn - cos pi w) lam_sum + (1 - dn) rho_sum] / sin(pi w)
        C = {[(1 + dn) lam_sum - dn rho_sum] sin(pi w/(1 + dn)) + rho_sum sin(dn pi w/(1 + dn))} / sin(pi w)
        D = {[dn rho_sum - (1 + dn) lam_sum] cos(pi w/(1 + dn)) + rho_sum cos(dn pi w/(1 + dn))} / sin(pi w)

    Singular (0/0) at integer ``w``.
    """
    dn = (n1 - n2) / (n1 + n2)
    pw = np.pi * omega
    csc = 1.0 / np.sin(pw)
    A = lam_sum
    B = ((dn - np.cos(pw)) * lam_sum + (1 - dn) * rho_sum) * csc
    C = (((1 + dn) * lam_sum - dn * rho_sum) * np.sin(pw / (1 + dn)) + rho_sum * np.sin(dn * pw / (1 + dn))) * csc
    D = ((dn * rho_sum - (1 + dn) * lam_sum) * np.cos(pw / (1 + dn)) + rho_sum * np.cos(dn * pw / (1 + dn))) * csc
    return A, B, C, D


def _qw_coefficients_regular(n1, n2, omega, bv: BoundaryVectors, k0):
    # layer 1 continues the n1 ambient, so E'(0) = i k1 (lam1 - lam2); same at the right edge
    k1 = n1 * k0 * omega
    k2 = n2 * k0 * omega
    d = np.pi / (2 * k0) * (1 / n1 + 1 / n2)
    A = bv.lam_sum
    B = 1j * (bv.lam[0] - bv.lam[1])
    E_d = bv.rho_sum
    dE_d = 1j * k1 * (bv.rho[0] - bv.rho[1]) / k2
    c, s = np.cos(k2 * d), np.sin(k2 * d)
    return A, B, E_d * c - dE_d * s, E_d * s + dE_d * c


def qw_cell_field(n1: float, n2: float, N: int, n: int, omega: float, k0: float = 1.0) -> CellField:
    """Quarter-wave closed form of the field in cell ``n``.

    Layer 1: ``A cos(k1 x) + B sin(k1 x)``; layer 2: ``C cos(k2 x) + D sin(k2 x)``,
    ``x`` cell-local.  Near integer ``omega`` the ``1/sin(pi w)`` form is 0/0;
    within 1e-6 of it the coefficients come from the boundary-vector
    components instead.
    """
    omega = float(omega)
    if omega <= 0:
        raise DomainError("omega must be positive")
    cell = quarter_wave_cell(n1, n2, k0)
    if abs(np.sin(np.pi * omega)) < QW_CSC_GUARD:
        s = qw_unit_amplitudes(n1, n2, omega)
        coeffs = _qw_coefficients_regular(n1, n2, omega, boundary_vectors(s.t, s.r, N, n), k0)
    else:
        lam_sum, rho_sum = qw_boundary_sums(n1, n2, N, n, omega)
        coeffs = qw_coefficients(n1, n2, omega, lam_sum, rho_sum)
    A, B, C, D = coeffs
    return CellField(cell, n, omega, np.array([[A, B], [C, D]], dtype=complex))


def stack_energy(fields: Sequence[CellField], method: str = "closed") -> StackEnergy:
    """``U_N = sum_n integral n(x)^2 |E_n|^2`` over the stack.

    ``method`` is ``"closed"`` (exact antiderivative) or ``"quad"``
    (adaptive Gauss-Kronrod per layer).
    """
    if method not in ("closed", "quad"):
        raise DomainError(f"unknown energy method {method!r}")
    per = []
    for fld in fields:
        if method == "closed":
            u = sum(fld.layer_energy(j) for j in range(len(fld.cell.layers)))
        else:
            u = sum(fld.layer_energy_quad(j) for j in range(len(fld.cell.layers)))
        per.append(u)
    return StackEnergy(float(sum(per)), tuple(per))


def normalize(fields: Sequence[CellField], energy: StackEnergy) -> list[CellField]:
    """Scale the fields by ``1/sqrt(U_N)`` so the stack energy is one."""
    if not energy.total > 0:
        raise DomainError("stack energy must be positive to normalise")
    factor = 1.0 / np.sqrt(energy.total)
    return [fld.scaled(factor) for fld in fields]


def stack_field_values(fields: Sequence[CellField], x):
    """Evaluate a full list of cell fields at global positions ``x``."""
    x = np.asarray(x, dtype=float)
    d = fields[0].cell.length
    N = len(fields)
    cells = np.clip(np.floor(x / d).astype(int), 0, N - 1)
    out = np.empty(x.shape, dtype=complex)
    for i in np.unique(cells):
        mask = cells == i
        out[mask] = fields[i](np.clip(x[mask] - i * d, 0.0, d))
    return out


def stack_derivative_values(fields: Sequence[CellField], x):
    x = np.asarray(x, dtype=float)
    d = fields[0].cell.length
    N = len(fields)
    cells = np.clip(np.floor(x / d).astype(int), 0, N - 1)
    out = np.empty(x.shape, dtype=complex)
    for i in np.unique(cells):
        mask = cells == i
        out[mask] = fields[i].derivative(np.clip(x[mask] - i * d, 0.0, d))
    return out
