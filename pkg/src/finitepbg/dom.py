"""Density of modes of a finite N-period stack.

Three independent routes are provided:

* ``phase``   numerical frequency derivative of ``arg t_N`` (Argand form),
* ``closed``  closed form in the unit-cell ``t``, ``dt/domega`` and the
  Chebyshev auxiliaries,
* ``qw``      the quarter-wave specialisation of the closed form.

All routes return ``rho * c`` (the DOM in units of ``1/c``), so a
homogeneous stack of index ``n`` gives ``n``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .bloch import chebyshev_pair, chebyshev_xi, chebyshev_xi_derivative, stack_transmission
from .core import UnitCell, cell_amplitudes, double_boundary
from .errors import DomainError
from .oracle import numeric_derivative

ROUTES = ("phase", "closed", "qw")
DERIVATIVE_STEP = 1e-6
DERIVATIVE_RTOL = 1e-7
# |1 - 2 R12 + cos(pi w)| below this: the qw expression is 0/0, use the recurrence form
QW_EDGE_GUARD = 1e-8


@dataclass(frozen=True)
class DomSample:
    omega: float | np.ndarray
    rho: float | np.ndarray
    route: str


@dataclass(frozen=True)
class BandEdges:
    edges: list = field(default_factory=list)


def _squeeze(a):
    return float(a) if np.ndim(a) == 0 else a


def bulk_velocity(n1: float, n2: float, c: float = 1.0) -> float:
    """Harmonic-mean group velocity ``c (1/n1 + 1/n2) / 2`` of a quarter-wave bilayer."""
    if n1 <= 0 or n2 <= 0:
        raise DomainError("indices must be positive")
    return c * (1.0 / n1 + 1.0 / n2) / 2.0


def cell_bulk_velocity(cell: UnitCell, c: float = 1.0) -> float:
    """``c d / sum(n_i L_i)``; reduces to :func:`bulk_velocity` for quarter-wave cells."""
    return c * cell.length / cell.optical_length


def quarter_wave_indices(cell: UnitCell, tol: float = 1e-12):
    """``(n1, n2)`` if ``cell`` is a quarter-wave bilayer in an ``n1`` ambient, else None."""
    if len(cell.layers) != 2:
        return None
    l1, l2 = cell.layers
    quarter = np.pi / (2 * cell.k0)
    if (
        abs(cell.ambient_index - l1.index) <= tol * l1.index
        and abs(l1.index * l1.thickness - quarter) <= tol * quarter
        and abs(l2.index * l2.thickness - quarter) <= tol * quarter
    ):
        return l1.index, l2.index
    return None


def dom_phase_derivative(cell: UnitCell, N: int, omega, h: float = DERIVATIVE_STEP) -> DomSample:
    """``(1/D) d(arg t_N)/domega`` with ``D = N d``.

    Uses ``(u v' - v u') / (u^2 + v^2) = Im(t_N' / t_N)``, which needs no
    phase unwrapping.  The derivative is Richardson-extrapolated from steps
    ``h`` and ``h/2``; an AccuracyWarning is raised when the two differ by
    more than 1e-7 relative.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise DomainError("omega must be positive")

    def t_n(w):
        return stack_transmission(cell, N, w).t

    dt, _ = numeric_derivative(t_n, omega, h, rtol=DERIVATIVE_RTOL)
    rho = np.imag(dt / t_n(omega)) / (N * cell.length * cell.k0)
    return DomSample(_squeeze(omega), _squeeze(rho), "phase")


def _unit_terms(t, dt):
    # mu = Re(t)/T = Re(1/t) = cos(beta), mu' = Im(t)/T = -Im(1/t); d/domega of both
    inv = 1.0 / t
    dinv = -dt / t**2
    return inv.real, -inv.imag, dinv.real, -dinv.imag


def dom_closed_form(t, dt, N: int, d: float, k0: float = 1.0, omega=None) -> DomSample:
    """Closed-form DOM from the unit-cell amplitude and its frequency derivative.

    With ``mu = cos(beta) = Re(t)/T``, ``mu' = Im(t)/T`` and dots denoting
    ``d/domega``::

        dphi_N/domega = [mu'. Xi_N Theta_N + mu' mu. (Theta_N dXi_N/dx - N Xi_N^2)]
                        / (Theta_N^2 + mu'^2 Xi_N^2)

    This is the half-angle form ``Xi_N Theta_N = Xi_2N / 2`` with the
    ``csc^2 beta`` terms folded into ``dXi_N/dx`` (a polynomial), so it is
    regular at band edges.
    """
    t = np.asarray(t, dtype=complex)
    dt = np.asarray(dt, dtype=complex)
    mu, mup, dmu, dmup = _unit_terms(t, dt)
    pair = chebyshev_pair(mu, N)
    xi, theta = np.asarray(pair.xi), np.asarray(pair.theta)
    dxi = chebyshev_xi_derivative(mu, N)
    num = dmup * xi * theta + mup * dmu * (theta * dxi - N * xi**2)
    den = theta**2 + mup**2 * xi**2
    rho = num / den / (N * d * k0)
    return DomSample(_squeeze(omega) if omega is not None else None, _squeeze(rho), "closed")


def _readings(t, dt, N, d, k0):
    """Candidate interpretations of the primed symbols in the csc^2 closed form.

    Returns a dict name -> rho*c.  Only "frequency-derivative" reproduces the
    phase derivative; the others are kept to document the resolution.
    """
    mu, mup, dmu, dmup = _unit_terms(np.asarray(t, complex), np.asarray(dt, complex))
    xi2n = chebyshev_xi(mu, 2 * N)
    pair = chebyshev_pair(mu, N)
    xi, theta = np.asarray(pair.xi), np.asarray(pair.theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        csc2 = 1.0 / (1.0 - mu**2)

    def evaluate(v, vp, v_den):
        num = 0.5 * xi2n * (vp + mu * mup * v * csc2) - N * mup * v * csc2
        return num / (N * d * k0 * (theta**2 + v_den**2 * xi**2))

    return {
        # v = dmu/domega, v' = dmu'/domega, denominator uses mu'
        "frequency-derivative": evaluate(dmu, dmup, mup),
        # same, but v kept literally in the denominator
        "derivative-in-denominator": evaluate(dmu, dmup, dmu),
        # v taken as mu' itself
        "imaginary-part": evaluate(mup, dmup, mup),
    }


def closed_form_readings(t, dt, N: int, d: float, k0: float = 1.0) -> dict:
    return _readings(t, dt, N, d, k0)


def resolve_closed_form_reading(t, dt, N, d, reference, k0: float = 1.0):
    """Pick the reading closest to ``reference`` (max relative deviation).

    Returns ``(best_name, {name: max_rel_dev})``.
    """
    devs = {}
    for name, rho in _readings(t, dt, N, d, k0).items():
        rel = np.abs(rho - reference) / np.abs(reference)
        devs[name] = float(np.nanmax(rel)) if np.all(np.isfinite(rel)) else float("inf")
    return min(devs, key=devs.get), devs


def qw_unit_derivative(n1: float, n2: float, omega):
    """Analytic ``dt/domega`` of the quarter-wave cell: ``i pi t / (1 - R12 e^{i pi w})``."""
    T12, R12 = double_boundary(n1, n2)
    e = np.exp(1j * np.pi * np.asarray(omega, dtype=float))
    t = T12 * e / (1 - R12 * e)
    return t, 1j * np.pi * t / (1 - R12 * e)


def dom_closed_form_cell(cell: UnitCell, N: int, omega, h: float = DERIVATIVE_STEP) -> DomSample:
    """Closed-form route for a cell; analytic ``dt`` for quarter-wave cells, numeric otherwise."""
    omega = np.asarray(omega, dtype=float)
    qw = quarter_wave_indices(cell)
    if qw is not None:
        t, dt = qw_unit_derivative(*qw, omega)
    else:
        t = cell_amplitudes(cell, omega).t
        dt, _ = numeric_derivative(lambda w: cell_amplitudes(cell, w).t, omega, h, rtol=DERIVATIVE_RTOL)
    out = dom_closed_form(t, dt, N, cell.length, cell.k0)
    return DomSample(_squeeze(omega), out.rho, "closed")


def dom_quarter_wave(n1: float, n2: float, N: int, omega, k0: float = 1.0) -> DomSample:
    """Quarter-wave DOM in closed form.

    With ``c = cos(pi w)``, ``s = sin(pi w)`` and
    ``cos(beta) = (c - R12) / T12``::

        rho = pi T12 / (k0 N d) * [2 N T12 cos^2(pi w/2) + R12 sin^2(pi w/2) Xi_2N]
              / ((1 - 2 R12 + c) (T12^2 Theta_N^2 + s^2 Xi_N^2))

    Exactly at a band edge both factors vanish; there the regular recurrence
    form is used instead.
    """
    omega = np.asarray(omega, dtype=float)
    T12, R12 = double_boundary(n1, n2)
    d = np.pi / (2 * k0) * (1 / n1 + 1 / n2)
    c = np.cos(np.pi * omega)
    s = np.sin(np.pi * omega)
    x = (c - R12) / T12
    pair = chebyshev_pair(x, N)
    xi, theta = np.asarray(pair.xi), np.asarray(pair.theta)
    xi2n = np.asarray(chebyshev_xi(x, 2 * N))
    edge_factor = 1 - 2 * R12 + c
    num = 2 * N * T12 * np.cos(np.pi * omega / 2) ** 2 + R12 * np.sin(np.pi * omega / 2) ** 2 * xi2n
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.pi * T12 / (k0 * N * d) * num / (edge_factor * (T12**2 * theta**2 + s**2 * xi**2))
    near = np.abs(edge_factor) < QW_EDGE_GUARD
    if np.any(near):
        t, dt = qw_unit_derivative(n1, n2, omega[near] if omega.ndim else omega)
        regular = dom_closed_form(t, dt, N, d, k0).rho
        if omega.ndim:
            rho = np.array(rho)
            rho[near] = regular
        else:
            rho = regular
    return DomSample(_squeeze(omega), _squeeze(rho), "qw")


def dom(cell: UnitCell, N: int, omega, route: str = "phase") -> DomSample:
    """Dispatch to one of :data:`ROUTES`."""
    if route == "phase":
        return dom_phase_derivative(cell, N, omega)
    if route == "closed":
        return dom_closed_form_cell(cell, N, omega)
    if route == "qw":
        qw = quarter_wave_indices(cell)
        if qw is None:
            raise DomainError("route 'qw' needs a quarter-wave cell")
        return dom_quarter_wave(*qw, N, omega, cell.k0)
    raise DomainError(f"unknown DOM route {route!r}; expected one of {ROUTES}")


def _edge_roots(f, omega_max, samples_per_unit=4000):
    grid = np.linspace(0.0, omega_max, max(16, int(samples_per_unit * omega_max)) + 1)
    vals = f(grid)
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0 and a > 0:
            roots.append(float(a))
        elif fa * fb < 0:
            roots.append(brentq(f, a, b, xtol=1e-15, rtol=1e-15))
    return sorted(roots)


def band_edges(n1: float, n2: float, omega_max: float) -> BandEdges:
    """Edges of the infinite-lattice gaps of a quarter-wave stack up to ``omega_max``.

    Roots of ``cos(beta) = (cos(pi w) - R12)/T12 = -1``.  The touching
    points ``cos(beta) = 1`` at even ``w`` bound no gap and are not listed.
    """
    if n1 == n2:
        return BandEdges([])
    T12, R12 = double_boundary(n1, n2)
    return BandEdges(_edge_roots(lambda w: (np.cos(np.pi * w) - R12) / T12 + 1.0, omega_max))


def band_edges_cell(cell: UnitCell, omega_max: float) -> BandEdges:
    """Sign changes of ``|cos(beta)| - 1`` for an arbitrary cell."""
    def f(w):
        t = cell_amplitudes(cell, w).t
        return np.abs(np.real(1.0 / t)) - 1.0

    def crosses(w, delta=1e-7):
        lo, hi = f(w - delta), f(w + delta)
        return lo * hi < 0 and min(abs(lo), abs(hi)) > 1e-12

    # |cos(beta)| = 1 touching points show up as rounding-noise sign changes
    return BandEdges([w for w in _edge_roots(f, omega_max) if crosses(w)])


def unit_bloch_points(cell: UnitCell, omega_max: float, samples_per_unit: int = 4000) -> np.ndarray:
    """Every ``omega`` in ``[0, omega_max]`` with ``|cos(beta)| = 1``.

    Band edges plus the touching points where ``|cos(beta)|`` reaches one
    without crossing it, and ``omega = 0``.
    """
    grid = np.linspace(0.0, omega_max, max(16, int(samples_per_unit * omega_max)) + 1)

    def g(w):
        return np.abs(np.real(1.0 / cell_amplitudes(cell, w).t))

    vals = g(grid)
    points = [0.0] + list(band_edges_cell(cell, omega_max).edges)
    for i in range(1, len(grid) - 1):
        if vals[i] >= vals[i - 1] and vals[i] >= vals[i + 1] and vals[i] <= 1.0 + 1e-9:
            best = minimize_scalar(lambda w: -float(g(w)), bounds=(grid[i - 1], grid[i + 1]),
                                   method="bounded", options={"xatol": 1e-12})
            if abs(-best.fun - 1.0) < 1e-9:
                points.append(float(best.x))
    return np.array(sorted(points))
