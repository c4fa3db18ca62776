"""Layered unit cells, interface coefficients and 2x2 transfer matrices.

Conventions
-----------
Frequencies are dimensionless, ``omega = w / w0``.  A cell carries the
reference vacuum wavenumber ``k0 = w0 / c`` so the phase across a layer of
index ``n`` and thickness ``L`` is ``n * omega * k0 * L``.

A boundary-condition vector holds the (right-moving, left-moving) wave
amplitudes in the ambient medium at a cell edge, each referenced to that
edge.  The transfer matrix maps the right-edge vector onto the left-edge
vector, ``lam = M @ rho``; for unit incidence from the left ``lam = (1, r)``
and ``rho = (t, 0)``.

Everything here broadcasts over numpy arrays of frequencies.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, SingularMatrixError

# |t| below this is treated as total reflection
T_FLOOR = 1e-300


def _check_index(n: float, name: str = "index") -> None:
    if not np.isfinite(n) or n <= 0:
        raise DomainError(f"{name} must be a positive finite real, got {n!r}")


@dataclass(frozen=True)
class Layer:
    """Homogeneous, lossless, dispersionless slab."""

    index: float
    thickness: float

    def __post_init__(self):
        _check_index(self.index)
        if not np.isfinite(self.thickness) or self.thickness <= 0:
            raise DomainError(f"thickness must be positive, got {self.thickness!r}")


@dataclass(frozen=True)
class UnitCell:
    """One period of the stack, embedded in an ambient medium.

    Parameters
    ----------
    layers : sequence of Layer
        Layers ordered left to right.
    ambient_index : float
        Index of the semi-infinite regions on either side of the cell
        (and of the stack built from it).
    k0 : float
        Reference vacuum wavenumber ``w0 / c``; sets the length scale of
        ``omega``.
    """

    layers: tuple[Layer, ...]
    ambient_index: float = 1.0
    k0: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise DomainError("a unit cell needs at least one layer")
        _check_index(self.ambient_index, "ambient_index")
        if not np.isfinite(self.k0) or self.k0 <= 0:
            raise DomainError(f"k0 must be positive, got {self.k0!r}")

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]], ambient_index=1.0, k0=1.0):
        return cls(tuple(Layer(n, L) for n, L in pairs), ambient_index, k0)

    @property
    def length(self) -> float:
        return float(sum(layer.thickness for layer in self.layers))

    @property
    def optical_length(self) -> float:
        return float(sum(layer.index * layer.thickness for layer in self.layers))

    @property
    def indices(self) -> np.ndarray:
        return np.array([layer.index for layer in self.layers])

    @property
    def thicknesses(self) -> np.ndarray:
        return np.array([layer.thickness for layer in self.layers])

    @property
    def interfaces(self) -> np.ndarray:
        """Cell-local positions of the layer boundaries, ``0 ... length``."""
        return np.concatenate([[0.0], np.cumsum(self.thicknesses)])

    @property
    def is_symmetric(self) -> bool:
        return self.layers == self.layers[::-1]

    def layer_index_at(self, x: float) -> int:
        """Layer containing cell-local position ``x`` (right-closed at the end)."""
        if x < 0 or x > self.length:
            raise DomainError(f"x={x} outside the cell [0, {self.length}]")
        edges = self.interfaces
        j = int(np.searchsorted(edges, x, side="right") - 1)
        return min(j, len(self.layers) - 1)

    def stacked(self, periods: int) -> tuple[Layer, ...]:
        return self.layers * periods


def quarter_wave_cell(n1: float, n2: float, k0: float = 1.0) -> UnitCell:
    """Bilayer with ``n1 a = n2 b = pi / (2 k0)`` in an ``n1`` ambient.

    The layer thicknesses are always derived from the indices; the gap of
    the resulting stack is centred on ``omega = 1``.
    """
    _check_index(n1, "n1")
    _check_index(n2, "n2")
    quarter = np.pi / (2.0 * k0)
    return UnitCell((Layer(n1, quarter / n1), Layer(n2, quarter / n2)), ambient_index=n1, k0=k0)


@dataclass(frozen=True)
class ScatterAmplitudes:
    """Complex transmission and reflection amplitudes (scalars or arrays)."""

    t: complex | np.ndarray
    r: complex | np.ndarray

    @property
    def T(self):
        return np.abs(self.t) ** 2

    @property
    def R(self):
        return np.abs(self.r) ** 2

    @property
    def phi(self):
        return np.angle(self.t)

    @property
    def psi(self):
        return np.angle(self.r)


@dataclass(frozen=True)
class TransferMatrix:
    """2x2 complex matrix ``[[m11, m12], [m21, m22]]``; entries may be arrays."""

    m11: complex | np.ndarray
    m12: complex | np.ndarray
    m21: complex | np.ndarray
    m22: complex | np.ndarray

    @classmethod
    def identity(cls, shape=()):
        one = np.ones(shape, dtype=complex)
        zero = np.zeros(shape, dtype=complex)
        if shape == ():
            one, zero = complex(one), complex(zero)
        return cls(one, zero, zero, one)

    @classmethod
    def from_array(cls, a) -> "TransferMatrix":
        a = np.asarray(a, dtype=complex)
        return cls(a[..., 0, 0], a[..., 0, 1], a[..., 1, 0], a[..., 1, 1])

    def to_array(self) -> np.ndarray:
        row0 = np.stack(np.broadcast_arrays(self.m11, self.m12), axis=-1)
        row1 = np.stack(np.broadcast_arrays(self.m21, self.m22), axis=-1)
        return np.stack([row0, row1], axis=-2)

    @property
    def det(self):
        return self.m11 * self.m22 - self.m12 * self.m21

    @property
    def half_trace(self):
        return 0.5 * (self.m11 + self.m22)

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    def scale_add_identity(self, a, b) -> "TransferMatrix":
        """Return ``a * self + b * I``."""
        return TransferMatrix(a * self.m11 + b, a * self.m12, a * self.m21, a * self.m22 + b)

    def apply(self, vec):
        v1, v2 = vec
        return (self.m11 * v1 + self.m12 * v2, self.m21 * v1 + self.m22 * v2)

    def inverse(self) -> "TransferMatrix":
        d = self.det
        return TransferMatrix(self.m22 / d, -self.m12 / d, -self.m21 / d, self.m11 / d)


def fresnel(n_i: float, n_j: float) -> tuple[float, float]:
    """Interface coefficients for a wave going from index ``n_i`` into ``n_j``.

    Returns ``(t_ij, r_ij)`` with ``t_ij = 2 n_i / (n_i + n_j)`` and
    ``r_ij = -(n_i - n_j) / (n_i + n_j)``.  Note the sign of ``r_ij``: it is
    minus the usual electric-field reflection coefficient, so that
    ``r_12 > 0`` when going into the denser medium.
    """
    _check_index(n_i, "n_i")
    _check_index(n_j, "n_j")
    s = n_i + n_j
    return 2.0 * n_i / s, -(n_i - n_j) / s


def double_boundary(n_i: float, n_j: float) -> tuple[float, float]:
    """``(T_ij, R_ij) = (t_ij t_ji, -r_ij r_ji)``; they sum to one."""
    t_ij, r_ij = fresnel(n_i, n_j)
    t_ji, r_ji = fresnel(n_j, n_i)
    return t_ij * t_ji, -r_ij * r_ji


def qw_unit_amplitudes(n1: float, n2: float, omega) -> ScatterAmplitudes:
    """Closed-form amplitudes of the quarter-wave cell (``n1`` layer, then ``n2``).

    With ``e = exp(i pi omega)``::

        t = T12 e / (1 - R12 e)
        r = r12 (e**2 - e) / (1 - R12 e)

    The reflection numerator was picked by comparing the candidate readings
    against the per-layer matrix product (see ``tests/test_core.py``).
    """
    _, r12 = fresnel(n1, n2)
    T12, R12 = double_boundary(n1, n2)
    e = np.exp(1j * np.pi * np.asarray(omega, dtype=float))
    den = 1.0 - R12 * e
    t = T12 * e / den
    r = r12 * (e * e - e) / den
    if np.ndim(t) == 0:
        t, r = complex(t), complex(r)
    return ScatterAmplitudes(t, r)


def matrix_from_amplitudes(s: ScatterAmplitudes) -> TransferMatrix:
    """Transfer matrix ``[[1/t, r*/t*], [r/t, 1/t*]]`` of a lossless reciprocal scatterer."""
    t, r = s.t, s.r
    if np.any(np.abs(t) < T_FLOOR):
        raise SingularMatrixError("t = 0 (total reflection): transfer matrix undefined")
    tc = np.conj(t)
    return TransferMatrix(1.0 / t, np.conj(r) / tc, r / t, 1.0 / tc)


def amplitudes_from_matrix(m: TransferMatrix) -> ScatterAmplitudes:
    """Read ``t = 1 / m11`` and ``r = m21 / m11`` back out of a transfer matrix."""
    if np.any(np.abs(m.m11) == 0) or not np.all(np.isfinite(m.m11)):
        raise SingularMatrixError("m11 is zero or non-finite")
    return ScatterAmplitudes(1.0 / m.m11, m.m21 / m.m11)


def cell_amplitudes(cell: UnitCell, omega) -> ScatterAmplitudes:
    """Amplitudes of an arbitrary piecewise-constant cell by per-layer propagation."""
    from .oracle import direct_matrix_product

    return amplitudes_from_matrix(direct_matrix_product(cell.layers, omega, cell.ambient_index, cell.k0))


def cell_matrix(cell: UnitCell, omega) -> TransferMatrix:
    from .oracle import direct_matrix_product

    return direct_matrix_product(cell.layers, omega, cell.ambient_index, cell.k0)
