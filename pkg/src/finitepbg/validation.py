"""Cross-route and oracle checks behind ``finitepbg validate``.

Each check returns a :class:`CheckResult` with the worst deviation seen and
the tolerance it was held to.  ``mutate`` swaps a deliberately broken piece
into the pipeline so the harness itself can be shown to catch errors.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np

from .bloch import bloch_cos, chebyshev_xi, smrf_power, stack_amplitudes
from .config import StackConfig
from .core import cell_amplitudes, matrix_from_amplitudes
from .dom import dom, quarter_wave_indices, unit_bloch_points
from .fields import (
    boundary_vectors,
    cell_field,
    normalize,
    stack_energy,
    stack_field_values,
    stack_fields,
)
from .oracle import direct_matrix_product, ode_field_solve

MUTATIONS = ("smrf",)

SMRF_TOL = 1e-10
LOSSLESS_TOL = 1e-10
DOM_TOL = 1e-6
DOM_EDGE_TOL = 1e-4
DOM_EDGE_HALF_WIDTH = 5e-4
ORACLE_TOL = 1e-8
CONTINUITY_TOL = 1e-9
NORM_TOL = 1e-8
EDGE_BC_TOL = 1e-10
HELMHOLTZ_TOL = 1e-6
HELMHOLTZ_STEP = 1e-4


@dataclass(frozen=True)
class CheckResult:
    name: str
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.deviation) and self.deviation <= self.tolerance)


def _corrupted_power(M, x, N):
    # sign slip on the identity term
    return M.scale_add_identity(chebyshev_xi(x, N), chebyshev_xi(x, N - 1))


def relative_frobenius(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def check_smrf(cfg: StackConfig, omegas, power: Callable = smrf_power) -> CheckResult:
    """Reduction formula against the direct product of ``N`` layer stacks."""
    worst = 0.0
    s = cell_amplitudes(cfg.cell, omegas)
    m = matrix_from_amplitudes(s)
    x = bloch_cos(s.t).x
    for N in range(1, cfg.periods + 1):
        fast = power(m, x, N).to_array()
        slow = direct_matrix_product(cfg.cell.stacked(N), omegas, cfg.cell.ambient_index,
                                     cfg.cell.k0).to_array()
        for i in range(len(omegas)):
            worst = max(worst, relative_frobenius(fast[i], slow[i]))
    return CheckResult("smrf vs direct product", worst, SMRF_TOL)


def check_lossless(cfg: StackConfig, omegas) -> CheckResult:
    s = cell_amplitudes(cfg.cell, omegas)
    stack = stack_amplitudes(s.t, s.r, cfg.periods)
    dev = np.abs(np.abs(stack.t) ** 2 + np.abs(stack.r) ** 2 - 1.0)
    return CheckResult("|t_N|^2 + |r_N|^2 = 1", float(np.max(dev)), LOSSLESS_TOL)


def dom_tolerances(cell, omegas) -> np.ndarray:
    """Per-frequency DOM tolerance: looser within 5e-4 of any ``|cos(beta)| = 1`` point."""
    special = unit_bloch_points(cell, float(np.max(omegas)) + 1e-3)
    dist = np.min(np.abs(np.asarray(omegas)[:, None] - special[None, :]), axis=1)
    return np.where(dist < DOM_EDGE_HALF_WIDTH, DOM_EDGE_TOL, DOM_TOL)


def check_dom_routes(cfg: StackConfig, omegas) -> CheckResult:
    """Worst relative spread between DOM routes, scaled by the per-point tolerance.

    The reported deviation is ``max(spread / tol) * 1e-6`` so that it can be
    compared against the interior tolerance directly.
    """
    routes = ["phase", "closed"]
    if quarter_wave_indices(cfg.cell) is not None:
        routes.append("qw")
    values = np.array([dom(cfg.cell, cfg.periods, omegas, r).rho for r in routes])
    ref = values[0]
    spread = np.max(np.abs(values - ref), axis=0) / np.abs(ref)
    tol = dom_tolerances(cfg.cell, omegas)
    return CheckResult("dom routes agree (" + ", ".join(routes) + ")",
                       float(np.max(spread / tol) * DOM_TOL), DOM_TOL)


def field_oracle_deviation(cell, N, n, omega, ppw=2000) -> float:
    """L-inf gap between the cell-``n`` field and the integrated Helmholtz solution."""
    ode = ode_field_solve(cell.stacked(N), omega, cell.ambient_index, cell.k0, ppw)
    d = cell.length
    mask = (ode.x >= (n - 1) * d) & (ode.x <= n * d)
    got = stack_field_values(stack_fields(cell, N, omega), ode.x[mask])
    return float(np.max(np.abs(got - ode.E[mask])))


def check_oracle_fields(cfg: StackConfig, omegas) -> CheckResult:
    worst = max(field_oracle_deviation(cfg.cell, cfg.periods, cfg.cell_index, w) for w in omegas)
    return CheckResult(f"cell {cfg.cell_index} field vs ODE oracle", worst, ORACLE_TOL)


def interface_jumps(cell, N, omega) -> float:
    """Largest relative jump of ``E`` or ``dE/dx`` across any interior interface."""
    fields = stack_fields(cell, N, omega)
    last = len(cell.layers) - 1
    pairs = []
    for n, fld in enumerate(fields):
        for j in range(last):
            end = cell.thicknesses[j]
            pairs.append(((fld.in_layer(j, end), fld.in_layer(j + 1, 0.0)),
                          (fld.derivative_in_layer(j, end), fld.derivative_in_layer(j + 1, 0.0))))
        if n + 1 < N:
            nxt = fields[n + 1]
            end = cell.thicknesses[last]
            pairs.append(((fld.in_layer(last, end), nxt.in_layer(0, 0.0)),
                          (fld.derivative_in_layer(last, end), nxt.derivative_in_layer(0, 0.0))))
    worst = 0.0
    for value, slope in pairs:
        for a, b in (value, slope):
            worst = max(worst, abs(a - b) / max(abs(a), abs(b), 1e-300))
    return worst


def helmholtz_residual(fld, step=HELMHOLTZ_STEP, samples=64, digits=30) -> float:
    """Worst ``|E'' + k^2 E| / (||E|| (k0 w)^2)`` from a central difference of step ``step * d``.

    Samples sit inside each layer so the stencil never straddles an
    interface.  In float64 the stencil's rounding floor ``~eps/h^2`` exceeds
    the bound once ``w`` drops below ~0.1, so the closed-form coefficients
    are evaluated with ``digits`` significant digits (``digits=None`` keeps
    float64).
    """
    cell = fld.cell
    d = cell.length
    norm = float(np.max(np.abs(fld(np.linspace(0.0, d, 1001)))))
    scale = norm * (cell.k0 * fld.omega) ** 2
    worst = 0.0
    if digits is None:
        h = step * d
        for j, thickness in enumerate(cell.thicknesses):
            s = np.linspace(2 * h, thickness - 2 * h, samples)
            E = fld.in_layer(j, s)
            d2 = (fld.in_layer(j, s + h) - 2 * E + fld.in_layer(j, s - h)) / h**2
            worst = max(worst, float(np.max(np.abs(d2 + fld.wavenumbers[j] ** 2 * E))) / scale)
        return worst
    with mpmath.workdps(digits):
        h = mpmath.mpf(step) * mpmath.mpf(d)
        for j, thickness in enumerate(cell.thicknesses):
            k = mpmath.mpf(fld.wavenumbers[j])
            P, Q = (mpmath.mpc(complex(c)) for c in fld.coeffs[j])
            x0 = mpmath.mpf(cell.interfaces[j])
            span = mpmath.mpf(thickness) - 4 * h

            def E(y):
                return P * mpmath.cos(k * y) + Q * mpmath.sin(k * y)

            for i in range(samples):
                x = x0 + 2 * h + span * i / (samples - 1)
                r = (E(x + h) - 2 * E(x) + E(x - h)) / h**2 + k * k * E(x)
                worst = max(worst, float(abs(r)) / scale)
    return worst


def check_helmholtz(cfg: StackConfig, omegas) -> CheckResult:
    worst = max(helmholtz_residual(cell_field(cfg.cell, cfg.periods, cfg.cell_index, w)) for w in omegas)
    return CheckResult(f"cell {cfg.cell_index} Helmholtz residual", worst, HELMHOLTZ_TOL)


def check_continuity(cfg: StackConfig, omegas) -> CheckResult:
    worst = max(interface_jumps(cfg.cell, cfg.periods, w) for w in omegas)
    return CheckResult("E, dE/dx continuous at interfaces", worst, CONTINUITY_TOL)


def check_normalization(cfg: StackConfig, omegas) -> CheckResult:
    worst = 0.0
    for w in omegas:
        fields = stack_fields(cfg.cell, cfg.periods, w)
        e = normalize(fields, stack_energy(fields))
        worst = max(worst, abs(stack_energy(e, "quad").total - 1.0))
    return CheckResult("normalised stack energy = 1", worst, NORM_TOL)


def check_edge_conditions(cfg: StackConfig, omegas) -> CheckResult:
    """``E(0) = 1 + r_N`` and ``E(N d) = t_N``; ``lam_1 = (1, r_N)``."""
    worst = 0.0
    L = cfg.periods * cfg.cell.length
    for w in omegas:
        s = cell_amplitudes(cfg.cell, w)
        st = stack_amplitudes(s.t, s.r, cfg.periods)
        fields = stack_fields(cfg.cell, cfg.periods, w)
        vals = stack_field_values(fields, np.array([0.0, L]))
        bv = boundary_vectors(s.t, s.r, cfg.periods, 1)
        worst = max(worst, abs(vals[0] - (1 + st.r)), abs(vals[1] - st.t),
                    abs(bv.lam[0] - 1), abs(bv.lam[1] - st.r))
    return CheckResult("stack edge values 1 + r_N, t_N", worst, EDGE_BC_TOL)


def run_checks(cfg: StackConfig, mutate: str | None = None, field_samples: int = 6) -> list[CheckResult]:
    """Run every check on ``cfg``'s grid; the field checks use ``field_samples`` grid points."""
    if mutate is not None and mutate not in MUTATIONS:
        raise ValueError(f"unknown mutation {mutate!r}; expected one of {MUTATIONS}")
    omegas = cfg.grid.values
    picks = omegas[np.unique(np.linspace(0, len(omegas) - 1, field_samples).round().astype(int))]
    power = _corrupted_power if mutate == "smrf" else smrf_power
    return [
        check_smrf(cfg, omegas[:: max(1, len(omegas) // 64)], power),
        check_lossless(cfg, omegas),
        check_dom_routes(cfg, omegas),
        check_edge_conditions(cfg, picks),
        check_continuity(cfg, picks),
        check_helmholtz(cfg, picks),
        check_normalization(cfg, picks),
        check_oracle_fields(cfg, picks),
    ]
