import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import frequencies, unit_cells
from finitepbg.bloch import stack_amplitudes
from finitepbg.core import Layer, amplitudes_from_matrix, cell_amplitudes, fresnel, quarter_wave_cell
from finitepbg.errors import AccuracyError, AccuracyWarning, DomainError
from finitepbg.oracle import (
    direct_matrix_product,
    interface_matrix,
    layer_matrix,
    numeric_derivative,
    ode_field_solve,
)


class TestMatrixProduct:
    def test_single_layer(self):
        layer = Layer(1.8, 0.6)
        a = direct_matrix_product([layer], 0.9, 1.2).to_array()
        b = layer_matrix(layer, 0.9, 1.2).to_array()
        assert np.array_equal(a, b)

    def test_single_interface_amplitudes(self):
        # going right through the n1 -> n2 interface: t = t12, r = r12 (this package's sign)
        m = interface_matrix(1.0, 2.0)
        t12, r12 = fresnel(1.0, 2.0)
        assert 1 / m.m11 == pytest.approx(t12)
        assert m.m21 / m.m11 == pytest.approx(-r12)

    def test_midgap_stack(self):
        cell = quarter_wave_cell(1, 2)
        s = amplitudes_from_matrix(direct_matrix_product(cell.stacked(5), 1.0))
        assert 1 / s.t == pytest.approx(-16.015625, rel=1e-12)
        assert s.T == pytest.approx(1 / 16.015625**2, rel=1e-12)

    def test_palindrome_phase(self):
        layers = [Layer(1.4, 0.3), Layer(2.9, 0.5)]
        m = direct_matrix_product(layers + layers[::-1], 0.77)
        s = amplitudes_from_matrix(m)
        diff = np.angle(np.exp(1j * (s.phi - s.psi)))
        assert abs(abs(diff) - np.pi / 2) < 1e-9

    @given(unit_cells(), frequencies)
    def test_unit_determinant(self, cell, w):
        m = direct_matrix_product(cell.stacked(3), w, cell.ambient_index)
        assert abs(m.det - 1) < 1e-12

    def test_empty(self):
        with pytest.raises(DomainError):
            direct_matrix_product([], 1.0)


class TestOdeSolve:
    def test_homogeneous_plane_wave(self):
        layers = [Layer(1.5, 2.0)]
        sol = ode_field_solve(layers, 0.8, ambient_index=1.5)
        assert np.max(np.abs(np.abs(sol.E) - 1.0)) < 1e-10
        assert abs(sol.r) < 1e-10

    def test_midgap_transmission(self):
        sol = ode_field_solve(quarter_wave_cell(1, 2).stacked(5), 1.0)
        assert 1 / sol.t == pytest.approx(-16.015625, rel=1e-9)

    @settings(max_examples=10)
    @given(unit_cells(max_layers=3), st.floats(0.1, 2.0))
    def test_energy_conservation(self, cell, w):
        sol = ode_field_solve(cell.stacked(2), w, cell.ambient_index)
        assert abs(abs(sol.t) ** 2 + abs(sol.r) ** 2 - 1) < 1e-8

    def test_matches_stack_amplitudes(self):
        cell = quarter_wave_cell(1, 2)
        s = cell_amplitudes(cell, 0.43)
        st5 = stack_amplitudes(s.t, s.r, 5)
        sol = ode_field_solve(cell.stacked(5), 0.43)
        assert abs(sol.t - st5.t) < 1e-10 and abs(sol.r - st5.r) < 1e-10

    def test_self_convergence(self):
        cell = quarter_wave_cell(1, 2)
        ode_field_solve(cell.stacked(5), 0.708034, convergence_tol=1e-9)

    def test_convergence_failure_reported(self):
        with pytest.raises(AccuracyError):
            ode_field_solve(quarter_wave_cell(1, 2).stacked(5), 0.9, points_per_wavelength=1000,
                            convergence_tol=1e-16)

    def test_resolution_floor(self):
        with pytest.raises(DomainError):
            ode_field_solve([Layer(1, 1)], 1.0, points_per_wavelength=100)


class TestNumericDerivative:
    def test_square(self):
        d, err = numeric_derivative(lambda x: x**2, 3.0)
        assert d == pytest.approx(6.0, abs=1e-9)
        assert err < 1e-6

    def test_constant(self):
        d, _ = numeric_derivative(lambda x: 0 * x + 4.0, 1.0)
        assert d == 0.0

    def test_complex(self):
        d, _ = numeric_derivative(lambda x: np.exp(1j * x), 0.4)
        assert d == pytest.approx(1j * np.exp(0.4j), abs=1e-9)

    def test_warning_on_drift(self):
        with pytest.warns(AccuracyWarning):
            numeric_derivative(lambda x: np.sin(1e4 * x), 0.1, h=1e-3, rtol=1e-9)

    def test_quiet_when_smooth(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            numeric_derivative(np.sin, 0.3, rtol=1e-6)
