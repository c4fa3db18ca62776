"""Exact density of modes, modal fields and dipole emission for finite 1D periodic stacks."""

__version__ = "0.1.0"

from .bloch import smrf_power, stack_amplitudes, transmission_resonances
from .core import Layer, ScatterAmplitudes, TransferMatrix, UnitCell, quarter_wave_cell
from .dom import band_edges, dom
from .emission import DipoleSpec, SpectralGrid, emission_rate, emission_spectrum, local_field_factor
from .fields import boundary_vectors, cell_field, normalize, qw_cell_field, stack_energy, stack_fields

__all__ = [
    "Layer", "UnitCell", "ScatterAmplitudes", "TransferMatrix", "quarter_wave_cell",
    "smrf_power", "stack_amplitudes", "transmission_resonances",
    "dom", "band_edges",
    "boundary_vectors", "cell_field", "qw_cell_field", "stack_fields", "stack_energy", "normalize",
    "DipoleSpec", "SpectralGrid", "emission_rate", "emission_spectrum", "local_field_factor",
]
