"""Brute-force numerics used as ground truth for the closed forms.

Two independent instruments live here: the ordered product of per-layer
2x2 matrices (each layer treated as a slab embedded in the ambient medium),
and a fixed-step RK4 integration of ``y'' + k0^2 omega^2 n(x)^2 y = 0``.
Neither touches the Chebyshev machinery.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import Layer, TransferMatrix, fresnel
from .errors import AccuracyError, AccuracyWarning, DomainError


def interface_matrix(n_left: float, n_right: float) -> TransferMatrix:
    """Map amplitudes just right of an interface onto those just left of it.

    Built from the interface coefficients ``(1/t_lr) [[1, -r_lr], [-r_lr, 1]]``
    (``r_lr`` in the sign convention of :func:`finitepbg.core.fresnel`).
    """
    t_lr, r_lr = fresnel(n_left, n_right)
    return TransferMatrix(1.0 / t_lr, -r_lr / t_lr, -r_lr / t_lr, 1.0 / t_lr)


def propagation_matrix(phase) -> TransferMatrix:
    """Homogeneous propagation over a layer with one-way phase ``phase``."""
    phase = np.asarray(phase, dtype=float)
    zero = np.zeros_like(phase, dtype=complex)
    return TransferMatrix(np.exp(-1j * phase), zero, zero, np.exp(1j * phase))


def layer_matrix(layer: Layer, omega, ambient_index: float, k0: float = 1.0) -> TransferMatrix:
    """Slab matrix: ambient -> layer, propagate, layer -> ambient.  det == 1."""
    phase = layer.index * k0 * layer.thickness * np.asarray(omega, dtype=float)
    return (
        interface_matrix(ambient_index, layer.index)
        @ propagation_matrix(phase)
        @ interface_matrix(layer.index, ambient_index)
    )


def direct_matrix_product(
    layers: Sequence[Layer], omega, ambient_index: float = 1.0, k0: float = 1.0
) -> TransferMatrix:
    """Ordered (left to right) product of the layer matrices of ``layers``."""
    if not layers:
        raise DomainError("empty layer list")
    omega = np.asarray(omega, dtype=float)
    m = TransferMatrix.identity(omega.shape)
    for layer in layers:
        m = m @ layer_matrix(layer, omega, ambient_index, k0)
    return m


@dataclass
class OdeField:
    """Field sampled by :func:`ode_field_solve`.

    ``E`` and ``dE`` have shape ``omega.shape + x.shape``; the solution is
    scaled so that the right-moving wave incident from the left has unit
    amplitude at ``x = 0``.
    """

    x: np.ndarray
    E: np.ndarray
    dE: np.ndarray
    t: np.ndarray
    r: np.ndarray
    omega: np.ndarray


def _rk4_layer(E, dE, k2, h, steps, out_E, out_dE, start):
    # y = (E, E'), y' = (E', -k^2 E); h < 0 marches leftwards
    for s in range(steps):
        k1a, k1b = dE, -k2 * E
        k2a, k2b = dE + 0.5 * h * k1b, -k2 * (E + 0.5 * h * k1a)
        k3a, k3b = dE + 0.5 * h * k2b, -k2 * (E + 0.5 * h * k2a)
        k4a, k4b = dE + h * k3b, -k2 * (E + h * k3a)
        E = E + h / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a)
        dE = dE + h / 6.0 * (k1b + 2 * k2b + 2 * k3b + k4b)
        out_E[..., start - 1 - s] = E
        out_dE[..., start - 1 - s] = dE
    return E, dE


def _solve(layers, omega, ambient_index, k0, ppw, refine=1):
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    if np.any(omega <= 0):
        raise DomainError("ode_field_solve needs omega > 0")
    w_max = float(omega.max())
    steps = []
    for layer in layers:
        wavelength = 2 * np.pi / (layer.index * k0 * w_max)
        steps.append(refine * max(4, int(np.ceil(layer.thickness * ppw / wavelength))))
    edges = np.concatenate([[0.0], np.cumsum([layer.thickness for layer in layers])])
    x = np.concatenate([[0.0]] + [
        np.linspace(edges[j], edges[j + 1], steps[j] + 1)[1:] for j in range(len(layers))
    ])
    npts = x.size
    E_out = np.empty(omega.shape + (npts,), dtype=complex)
    dE_out = np.empty_like(E_out)

    ka = ambient_index * k0 * omega
    E = np.ones_like(omega, dtype=complex)
    dE = 1j * ka
    E_out[..., -1] = E
    dE_out[..., -1] = dE
    idx = npts - 1
    for j in range(len(layers) - 1, -1, -1):
        k2 = (layers[j].index * k0 * omega) ** 2
        h = -layers[j].thickness / steps[j]
        E, dE = _rk4_layer(E, dE, k2, h, steps[j], E_out, dE_out, idx)
        idx -= steps[j]
    assert idx == 0

    alpha = 0.5 * (E + dE / (1j * ka))
    gamma = 0.5 * (E - dE / (1j * ka))
    scale = 1.0 / alpha
    E_out *= scale[:, None]
    dE_out *= scale[:, None]
    return x, E_out, dE_out, scale, gamma * scale, omega


def ode_field_solve(
    layers: Sequence[Layer],
    omega,
    ambient_index: float = 1.0,
    k0: float = 1.0,
    points_per_wavelength: int = 2000,
    convergence_tol: float | None = None,
) -> OdeField:
    """Integrate the Helmholtz equation through ``layers`` from right to left.

    The right edge carries a purely outgoing wave; after integration the
    left-edge field is split into incident and reflected parts and the whole
    solution is rescaled to unit incidence.  Step sizes are uniform within
    each layer and chosen from the largest frequency in ``omega``.

    Parameters
    ----------
    points_per_wavelength : int
        RK4 steps per in-layer wavelength; must be at least 1000.
    convergence_tol : float, optional
        When given, repeat the solve at twice the resolution and raise
        :class:`AccuracyError` if the fields differ by more than this (L-inf).
    """
    if points_per_wavelength < 1000:
        raise DomainError("points_per_wavelength must be >= 1000")
    scalar = np.ndim(omega) == 0
    x, E, dE, t, r, w = _solve(layers, omega, ambient_index, k0, points_per_wavelength)
    if convergence_tol is not None:
        _, E2, *_ = _solve(layers, omega, ambient_index, k0, points_per_wavelength, refine=2)
        diff = np.max(np.abs(E - E2[:, ::2]))
        if diff > convergence_tol:
            raise AccuracyError(f"ODE field not converged: change {diff:.3e} > {convergence_tol:.1e}")
    if scalar:
        return OdeField(x, E[0], dE[0], t[0], r[0], w[0])
    return OdeField(x, E, dE, t, r, w)


def numeric_derivative(fn: Callable, x, h: float = 1e-6, rtol: float | None = None):
    """Richardson-extrapolated central difference of ``fn`` at ``x``.

    Returns ``(derivative, error_estimate)``.  The estimate is the gap
    between the step-``h`` and step-``h/2`` central differences divided by
    three.  If ``rtol`` is given and the estimate exceeds ``rtol`` times the
    derivative's magnitude an :class:`AccuracyWarning` is issued.
    """
    x = np.asarray(x, dtype=float)
    d1 = (fn(x + h) - fn(x - h)) / (2 * h)
    d2 = (fn(x + h / 2) - fn(x - h / 2)) / h
    deriv = (4 * d2 - d1) / 3
    err = np.abs(d2 - d1) / 3
    if rtol is not None:
        scale = np.maximum(np.abs(deriv), np.finfo(float).tiny)
        if np.any(err > rtol * scale):
            warnings.warn(
                f"numeric derivative drift {np.max(err / scale):.2e} exceeds {rtol:.1e}",
                AccuracyWarning,
                stacklevel=2,
            )
    return deriv, err
