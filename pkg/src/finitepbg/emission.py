"""Scaled dipole emission rate: DOM times normalised modal intensity.

``p = rho(w) |e_n(w, x0)|^2`` with ``e_n = E_n / sqrt(U_N)``.  The
reference is a dipole in an unbounded medium of index ``n(x0)`` normalised
over the same length ``L = N d``: ``rho_bulk = n/c`` and ``|e|^2 = 1/(n^2 L)``,
so ``p_bulk = 1/(n c L)`` and ``p_rel = p n c L``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import UnitCell
from .dom import dom
from .errors import DomainError
from .fields import stack_energy, stack_fields

LOCAL_FIELD_REGIMES = ("tenuous", "dense")


@dataclass(frozen=True)
class DipoleSpec:
    """Dipole oriented perpendicular to the stack axis.

    Parameters
    ----------
    cell_index : int
        Cell number ``n``, 1-based.
    layer : int
        Layer within the cell, 0-based (0 is the low-x layer of a
        quarter-wave cell).
    fraction : float
        Position inside the layer as a fraction of its thickness.
    """

    cell_index: int
    layer: int = 0
    fraction: float = 0.5

    def __post_init__(self):
        if int(self.cell_index) != self.cell_index or self.cell_index < 1:
            raise DomainError(f"cell_index must be a positive integer, got {self.cell_index!r}")
        if int(self.layer) != self.layer or self.layer < 0:
            raise DomainError(f"layer must be a non-negative integer, got {self.layer!r}")
        if not 0.0 <= self.fraction <= 1.0:
            raise DomainError(f"fraction must lie in [0, 1], got {self.fraction!r}")

    @classmethod
    def at_offset(cls, cell: UnitCell, cell_index: int, offset: float) -> "DipoleSpec":
        """Place the dipole at cell-local ``offset`` in ``[0, d]``."""
        j = cell.layer_index_at(offset)
        return cls(cell_index, j, (offset - cell.interfaces[j]) / cell.thicknesses[j])

    def check(self, cell: UnitCell, N: int) -> None:
        if self.cell_index > N:
            raise DomainError(f"cell_index {self.cell_index} outside the {N}-period stack")
        if self.layer >= len(cell.layers):
            raise DomainError(f"layer {self.layer} outside a {len(cell.layers)}-layer cell")

    def offset(self, cell: UnitCell) -> float:
        return float(cell.interfaces[self.layer] + self.fraction * cell.thicknesses[self.layer])

    def index(self, cell: UnitCell) -> float:
        return cell.layers[self.layer].index


@dataclass(frozen=True)
class EmissionSample:
    omega: float
    p: float
    p_rel: float


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform frequency grid ``linspace(start, stop, points)``."""

    start: float
    stop: float
    points: int

    def __post_init__(self):
        if int(self.points) != self.points or self.points < 1:
            raise DomainError("points must be a positive integer")
        if self.points > 1 and not self.stop > self.start:
            raise DomainError("grid must be increasing (stop > start)")
        if self.start <= 0:
            raise DomainError("grid frequencies must be positive")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


def _intensity(dipole: DipoleSpec, cell: UnitCell, N: int, omega: float) -> float:
    fields = stack_fields(cell, N, omega)
    energy = stack_energy(fields)
    return abs(fields[dipole.cell_index - 1](dipole.offset(cell))) ** 2 / energy.total


def emission_rate(dipole: DipoleSpec, cell: UnitCell, N: int, omega: float,
                  route: str = "phase", c: float = 1.0) -> EmissionSample:
    """Scaled emission rate at one frequency.

    ``route`` selects the DOM route (see :func:`finitepbg.dom.dom`).
    """
    dipole.check(cell, N)
    omega = float(omega)
    if omega <= 0:
        raise DomainError("omega must be positive")
    rho = float(dom(cell, N, omega, route).rho) / c
    p = rho * _intensity(dipole, cell, N, omega)
    p_rel = p * dipole.index(cell) * c * N * cell.length
    return EmissionSample(omega, p, p_rel)


def emission_spectrum(dipole: DipoleSpec, cell: UnitCell, N: int, grid,
                      route: str = "phase", c: float = 1.0) -> list[EmissionSample]:
    """:func:`emission_rate` at each point of ``grid`` (a SpectralGrid or increasing array)."""
    values = grid.values if isinstance(grid, SpectralGrid) else np.asarray(grid, dtype=float)
    if values.ndim != 1 or np.any(np.diff(values) <= 0):
        raise DomainError("spectral grid must be strictly increasing")
    return [emission_rate(dipole, cell, N, w, route, c) for w in values]


def local_field_factor(n: float, regime: str = "tenuous") -> float:
    """Local-field enhancement ``n^3`` (tenuous) or ``(2 + n^2)/3`` (dense).

    Informational only; never applied to ``p_rel``.
    """
    if not n > 0:
        raise DomainError("index must be positive")
    if regime == "tenuous":
        return float(n) ** 3
    if regime == "dense":
        return (2.0 + float(n) ** 2) / 3.0
    raise DomainError(f"unknown regime {regime!r}; expected one of {LOCAL_FIELD_REGIMES}")
